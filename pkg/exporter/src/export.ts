/**
 * Batched frozen inference over a loaded dataset, written straight to the
 * TSPE/TSPL interchange files in dataset index order.  No augmentation and
 * no parameter updates: re-running a job reproduces the files exactly.
 */
import * as tf from '@tensorflow/tfjs'

import type { Backbone } from './backbone.js'
import type { LoadedDataset } from './datasets.js'
import { writeEmbeddings, writeLabels } from './format.js'

export interface ExportJob {
  dataset: LoadedDataset
  backbone: Backbone
  batchSize: number
  outEmbeddings: string
  outLabels: string
}

export interface ExportSummary {
  rows: number
  cols: number
  backbone: string
}

function preprocess(
  dataset: LoadedDataset,
  start: number,
  count: number,
  backbone: Backbone,
): tf.Tensor4D {
  const { height, width, channels } = dataset
  const imageLen = height * width * channels
  const slice = dataset.pixels.subarray(start * imageLen, (start + count) * imageLen)
  return tf.tidy(() => {
    let batch = tf.tensor4d(slice, [count, height, width, channels])
    if (height !== backbone.inputSize || width !== backbone.inputSize) {
      batch = tf.image.resizeBilinear(batch, [
        backbone.inputSize,
        backbone.inputSize,
      ])
    }
    const mean = tf.tensor1d(backbone.mean)
    const std = tf.tensor1d(backbone.std)
    return batch.sub(mean).div(std) as tf.Tensor4D
  })
}

export async function runExport(job: ExportJob): Promise<ExportSummary> {
  const { dataset, backbone, batchSize } = job
  if (batchSize < 1) throw new Error('batchSize must be >= 1')
  const out = new Float32Array(dataset.n * backbone.dim)
  for (let start = 0; start < dataset.n; start += batchSize) {
    const count = Math.min(batchSize, dataset.n - start)
    const batch = preprocess(dataset, start, count, backbone)
    const embedded = backbone.embed(batch)
    const values = (await embedded.data()) as Float32Array
    out.set(values, start * backbone.dim)
    batch.dispose()
    embedded.dispose()
  }
  writeEmbeddings(job.outEmbeddings, dataset.n, backbone.dim, out)
  writeLabels(job.outLabels, dataset.labels)
  return { rows: dataset.n, cols: backbone.dim, backbone: backbone.name }
}
