/**
 * Frozen feature extractors.  A backbone maps a normalized image batch to
 * one embedding row per image and is never trained here; exports must be
 * reproducible bit for bit.
 */
import { readFileSync, readdirSync } from 'node:fs'
import { join } from 'node:path'
import * as tf from '@tensorflow/tfjs'

export interface Backbone {
  name: string
  dim: number
  /** square input resolution the backbone expects */
  inputSize: number
  /** per-channel normalization applied after resizing to [0,1] */
  mean: [number, number, number]
  std: [number, number, number]
  /** batch is (b, inputSize, inputSize, 3), already normalized */
  embed(batch: tf.Tensor4D): tf.Tensor2D
}

export const IMAGENET_MEAN: [number, number, number] = [0.485, 0.456, 0.406]
export const IMAGENET_STD: [number, number, number] = [0.229, 0.224, 0.225]

/** Deterministic 32-bit PRNG for reproducible stand-in weights. */
function mulberry32(seed: number): () => number {
  let a = seed >>> 0
  return () => {
    a = (a + 0x6d2b79f5) >>> 0
    let t = a
    t = Math.imul(t ^ (t >>> 15), t | 1)
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61)
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296
  }
}

/**
 * Frozen random-projection backbone: flatten the resized image and apply a
 * fixed seeded linear map.  A stand-in for offline tests and pipeline
 * plumbing, not a substitute for a pretrained encoder.
 */
export function projectionBackbone(
  dim: number,
  seed = 1,
  inputSize = 32,
): Backbone {
  if (dim < 1) throw new Error(`dim must be >= 1, got ${dim}`)
  const inputDim = inputSize * inputSize * 3
  const rand = mulberry32(seed)
  const weights = new Float32Array(inputDim * dim)
  const scale = 1 / Math.sqrt(inputDim)
  for (let i = 0; i < weights.length; i++) {
    weights[i] = (2 * rand() - 1) * scale
  }
  const kernel = tf.tensor2d(weights, [inputDim, dim])
  return {
    name: `projection-${dim}-seed${seed}`,
    dim,
    inputSize,
    mean: [0.5, 0.5, 0.5],
    std: [0.5, 0.5, 0.5],
    embed: (batch) =>
      tf.tidy(() => {
        const flat = batch.reshape([batch.shape[0], inputDim]) as tf.Tensor2D
        return tf.matMul(flat, kernel)
      }),
  }
}

function concatWeightBuffers(buffers: Buffer[]): ArrayBuffer {
  const total = buffers.reduce((s, b) => s + b.length, 0)
  const out = new Uint8Array(total)
  let offset = 0
  for (const b of buffers) {
    out.set(b, offset)
    offset += b.length
  }
  return out.buffer
}

/** IOHandler that loads tfjs model artifacts from a local directory. */
function directoryHandler(dir: string): tf.io.IOHandler {
  return {
    load: async () => {
      const modelJson = JSON.parse(readFileSync(join(dir, 'model.json'), 'utf8'))
      const weightSpecs: tf.io.WeightsManifestEntry[] = []
      const buffers: Buffer[] = []
      for (const group of modelJson.weightsManifest ?? []) {
        weightSpecs.push(...group.weights)
        for (const p of group.paths) buffers.push(readFileSync(join(dir, p)))
      }
      return {
        modelTopology: modelJson.modelTopology,
        format: modelJson.format,
        generatedBy: modelJson.generatedBy,
        convertedBy: modelJson.convertedBy,
        weightSpecs,
        weightData: concatWeightBuffers(buffers),
      }
    },
  }
}

/**
 * Load a pretrained checkpoint from a local tfjs model directory
 * (model.json + weight shards, either graph-model or layers-model format)
 * and wrap it as a frozen backbone.  Rank-4 outputs are average-pooled
 * over space; rank-3 outputs are averaged over tokens.
 */
export async function loadDirectoryBackbone(
  dir: string,
  inputSize: number,
  opts: {
    mean?: [number, number, number]
    std?: [number, number, number]
  } = {},
): Promise<Backbone> {
  const modelJson = JSON.parse(readFileSync(join(dir, 'model.json'), 'utf8'))
  const handler = directoryHandler(dir)
  const isLayers = modelJson.format === 'layers-model'
  const model = isLayers
    ? await tf.loadLayersModel(handler)
    : await tf.loadGraphModel(handler)

  const run = (batch: tf.Tensor4D): tf.Tensor2D =>
    tf.tidy(() => {
      let out = (model as tf.LayersModel | tf.GraphModel).predict(
        batch,
      ) as tf.Tensor
      if (Array.isArray(out)) out = out[0]
      if (out.rank === 4) out = out.mean([1, 2])
      else if (out.rank === 3) out = out.mean([1])
      if (out.rank !== 2) {
        throw new Error(`unsupported backbone output rank ${out.rank}`)
      }
      return out as tf.Tensor2D
    })

  // Probe the output width once so dim is known up front.
  const probe = tf.zeros([1, inputSize, inputSize, 3]) as tf.Tensor4D
  const probed = run(probe)
  const dim = probed.shape[1]
  probe.dispose()
  probed.dispose()

  return {
    name: `local:${dir}`,
    dim,
    inputSize,
    mean: opts.mean ?? IMAGENET_MEAN,
    std: opts.std ?? IMAGENET_STD,
    embed: run,
  }
}

/** Stable digest of a model directory, for the no-training guarantee. */
export function modelDirDigest(dir: string): string {
  const names = readdirSync(dir).sort()
  let h = 2166136261 >>> 0
  const mix = (byte: number) => {
    h = Math.imul(h ^ byte, 16777619) >>> 0
  }
  for (const name of names) {
    for (const ch of Buffer.from(name)) mix(ch)
    const blob = readFileSync(join(dir, name))
    for (const byte of blob) mix(byte)
  }
  return h.toString(16).padStart(8, '0')
}
