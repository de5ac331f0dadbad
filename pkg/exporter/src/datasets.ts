/**
 * Readers for the standard binary image-dataset formats.  These need no
 * image codecs: CIFAR-10/100 and STL-10 ship raw uint8 tensors.
 *
 * Pixels come out as float32 in [0, 1], HWC row-major, dataset index order.
 */
import { readFileSync } from 'node:fs'

export interface LoadedDataset {
  name: string
  n: number
  height: number
  width: number
  channels: number
  /** n * height * width * channels, HWC per image */
  pixels: Float32Array
  labels: Uint32Array
}

const CIFAR_SIDE = 32
const CIFAR_PLANE = CIFAR_SIDE * CIFAR_SIDE
const CIFAR_IMAGE_BYTES = 3 * CIFAR_PLANE
const STL_SIDE = 96
const STL_PLANE = STL_SIDE * STL_SIDE
const STL_IMAGE_BYTES = 3 * STL_PLANE

/** Channel-planar (RRR..GGG..BBB) to interleaved HWC, normalized. */
function planarToHwc(
  src: Buffer,
  offset: number,
  side: number,
  out: Float32Array,
  outOffset: number,
): void {
  const plane = side * side
  for (let p = 0; p < plane; p++) {
    for (let ch = 0; ch < 3; ch++) {
      out[outOffset + p * 3 + ch] = src[offset + ch * plane + p] / 255
    }
  }
}

/** CIFAR-10 batches: records of [label u8 | 3072 planar pixel bytes]. */
export function loadCifar10(paths: string[], limit?: number): LoadedDataset {
  const records: { label: number; buf: Buffer; offset: number }[] = []
  for (const path of paths) {
    const blob = readFileSync(path)
    if (blob.length % (1 + CIFAR_IMAGE_BYTES) !== 0) {
      throw new Error(`${path}: not a CIFAR-10 batch file`)
    }
    const count = blob.length / (1 + CIFAR_IMAGE_BYTES)
    for (let i = 0; i < count; i++) {
      const offset = i * (1 + CIFAR_IMAGE_BYTES)
      records.push({ label: blob[offset], buf: blob, offset: offset + 1 })
    }
  }
  return assembleCifar('cifar10', records, limit)
}

/** CIFAR-100: records of [coarse u8 | fine u8 | 3072 planar pixel bytes]. */
export function loadCifar100(path: string, limit?: number): LoadedDataset {
  const blob = readFileSync(path)
  if (blob.length % (2 + CIFAR_IMAGE_BYTES) !== 0) {
    throw new Error(`${path}: not a CIFAR-100 file`)
  }
  const count = blob.length / (2 + CIFAR_IMAGE_BYTES)
  const records: { label: number; buf: Buffer; offset: number }[] = []
  for (let i = 0; i < count; i++) {
    const offset = i * (2 + CIFAR_IMAGE_BYTES)
    // Fine label; the coarse byte is ignored.
    records.push({ label: blob[offset + 1], buf: blob, offset: offset + 2 })
  }
  return assembleCifar('cifar100', records, limit)
}

function assembleCifar(
  name: string,
  records: { label: number; buf: Buffer; offset: number }[],
  limit?: number,
): LoadedDataset {
  const n = limit ? Math.min(limit, records.length) : records.length
  if (n === 0) throw new Error(`${name}: no records`)
  const pixels = new Float32Array(n * CIFAR_IMAGE_BYTES)
  const labels = new Uint32Array(n)
  for (let i = 0; i < n; i++) {
    labels[i] = records[i].label
    planarToHwc(
      records[i].buf,
      records[i].offset,
      CIFAR_SIDE,
      pixels,
      i * CIFAR_IMAGE_BYTES,
    )
  }
  return {
    name,
    n,
    height: CIFAR_SIDE,
    width: CIFAR_SIDE,
    channels: 3,
    pixels,
    labels,
  }
}

/**
 * STL-10: images file holds 96x96x3 uint8 per image, column-major within
 * each channel plane; labels file holds one 1-based u8 per image (absent
 * for the unlabeled split).
 */
export function loadStl10(
  imagesPath: string,
  labelsPath?: string,
  limit?: number,
): LoadedDataset {
  const blob = readFileSync(imagesPath)
  if (blob.length % STL_IMAGE_BYTES !== 0) {
    throw new Error(`${imagesPath}: not an STL-10 image file`)
  }
  const total = blob.length / STL_IMAGE_BYTES
  const n = limit ? Math.min(limit, total) : total
  if (n === 0) throw new Error('stl10: no records')
  const pixels = new Float32Array(n * STL_IMAGE_BYTES)
  for (let i = 0; i < n; i++) {
    const base = i * STL_IMAGE_BYTES
    for (let ch = 0; ch < 3; ch++) {
      for (let col = 0; col < STL_SIDE; col++) {
        for (let row = 0; row < STL_SIDE; row++) {
          const src = base + ch * STL_PLANE + col * STL_SIDE + row
          const dst = base + (row * STL_SIDE + col) * 3 + ch
          pixels[dst] = blob[src] / 255
        }
      }
    }
  }
  const labels = new Uint32Array(n)
  if (labelsPath) {
    const raw = readFileSync(labelsPath)
    if (raw.length < n) {
      throw new Error(`${labelsPath}: ${raw.length} labels for ${n} images`)
    }
    for (let i = 0; i < n; i++) labels[i] = raw[i] - 1 // 1-based on disk
  }
  return {
    name: 'stl10',
    n,
    height: STL_SIDE,
    width: STL_SIDE,
    channels: 3,
    pixels,
    labels,
  }
}
