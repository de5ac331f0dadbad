#!/usr/bin/env node
/**
 * Export frozen-backbone embeddings of an image dataset to TSPE/TSPL files
 * consumable by the tspcluster pipeline.
 *
 * Usage:
 *   tspe-export --dataset cifar10 --data data_batch_1.bin[,data_batch_2.bin...]
 *       --backbone graph:/path/to/tfjs_model:224
 *       --out-embeddings train.tspe --out-labels train.tspl [--batch-size 64]
 *       [--limit N]
 *
 * Backbones:
 *   graph:<modelDir>[:<inputSize>]   local tfjs model directory (frozen)
 *   projection:<dim>[:<seed>]        deterministic stand-in, for plumbing
 *
 * STL-10 takes --data images.bin,labels.bin (labels optional).
 */
import { parseArgs } from 'node:util'
import * as tf from '@tensorflow/tfjs'

import {
  loadDirectoryBackbone,
  modelDirDigest,
  projectionBackbone,
  type Backbone,
} from './backbone.js'
import { loadCifar10, loadCifar100, loadStl10 } from './datasets.js'
import { runExport } from './export.js'

async function resolveBackbone(spec: string): Promise<Backbone> {
  const [kind, ...rest] = spec.split(':')
  if (kind === 'projection') {
    const dim = Number(rest[0] ?? 128)
    const seed = Number(rest[1] ?? 1)
    return projectionBackbone(dim, seed)
  }
  if (kind === 'graph') {
    const dir = rest[0]
    if (!dir) throw new Error('graph backbone needs a model directory')
    const inputSize = Number(rest[1] ?? 224)
    const digest = modelDirDigest(dir)
    const backbone = await loadDirectoryBackbone(dir, inputSize)
    const after = modelDirDigest(dir)
    if (after !== digest) throw new Error('model directory changed during load')
    console.error(`loaded ${dir} (digest ${digest}, dim ${backbone.dim})`)
    return backbone
  }
  throw new Error(`unknown backbone kind ${kind}`)
}

function loadDataset(name: string, data: string, limit?: number) {
  const paths = data.split(',').filter((p) => p.length > 0)
  if (name === 'cifar10') return loadCifar10(paths, limit)
  if (name === 'cifar100') {
    if (paths.length !== 1) throw new Error('cifar100 takes one data file')
    return loadCifar100(paths[0], limit)
  }
  if (name === 'stl10') return loadStl10(paths[0], paths[1], limit)
  throw new Error(`unknown dataset ${name} (cifar10|cifar100|stl10)`)
}

export async function main(argv: string[]): Promise<number> {
  let values
  try {
    values = parseArgs({
      args: argv,
      options: {
        dataset: { type: 'string' },
        data: { type: 'string' },
        backbone: { type: 'string', default: 'projection:128' },
        'batch-size': { type: 'string', default: '64' },
        limit: { type: 'string' },
        'out-embeddings': { type: 'string' },
        'out-labels': { type: 'string' },
      },
    }).values
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`)
    return 2
  }
  const missing = ['dataset', 'data', 'out-embeddings', 'out-labels'].filter(
    (k) => !(values as Record<string, unknown>)[k],
  )
  if (missing.length > 0) {
    console.error(`usage error: missing --${missing.join(', --')}`)
    return 2
  }
  try {
    await tf.setBackend('cpu')
    const limit = values.limit ? Number(values.limit) : undefined
    const dataset = loadDataset(values.dataset!, values.data!, limit)
    const backbone = await resolveBackbone(values.backbone!)
    const summary = await runExport({
      dataset,
      backbone,
      batchSize: Number(values['batch-size']),
      outEmbeddings: values['out-embeddings']!,
      outLabels: values['out-labels']!,
    })
    console.log(
      `wrote ${summary.rows} x ${summary.cols} embeddings ` +
        `(${summary.backbone}) -> ${values['out-embeddings']}`,
    )
    console.log(`wrote labels -> ${values['out-labels']}`)
    return 0
  } catch (err) {
    console.error(`error: ${(err as Error).message}`)
    return 1
  }
}

const invokedDirectly =
  process.argv[1] && import.meta.url.endsWith(process.argv[1].split('/').pop()!)
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code
  })
}
