/**
 * TSPE / TSPL interchange files, byte-compatible with the Python pipeline.
 *
 * TSPE: magic "TSPE" | u32 LE version=1 | u64 LE rows | u64 LE cols
 *       | rows*cols float32 LE, row-major
 * TSPL: magic "TSPL" | u32 LE version=1 | u64 LE count | count u32 LE
 *       labels, 0xFFFFFFFF = unlabeled
 */
import { writeFileSync, readFileSync } from 'node:fs'

export const EMBEDDING_MAGIC = 'TSPE'
export const LABEL_MAGIC = 'TSPL'
export const FORMAT_VERSION = 1
export const UNLABELED = 0xffffffff

export function encodeEmbeddings(
  rows: number,
  cols: number,
  values: Float32Array,
): Buffer {
  if (rows < 1 || cols < 1) {
    throw new Error(`empty dataset: ${rows} x ${cols}`)
  }
  if (values.length !== rows * cols) {
    throw new Error(
      `payload length ${values.length} != rows*cols = ${rows * cols}`,
    )
  }
  for (const v of values) {
    if (!Number.isFinite(v)) throw new Error('non-finite embedding value')
  }
  const header = Buffer.alloc(24)
  header.write(EMBEDDING_MAGIC, 0, 'ascii')
  header.writeUInt32LE(FORMAT_VERSION, 4)
  header.writeBigUInt64LE(BigInt(rows), 8)
  header.writeBigUInt64LE(BigInt(cols), 16)
  const payload = Buffer.alloc(values.length * 4)
  for (let i = 0; i < values.length; i++) {
    payload.writeFloatLE(values[i], i * 4)
  }
  return Buffer.concat([header, payload])
}

export function writeEmbeddings(
  path: string,
  rows: number,
  cols: number,
  values: Float32Array,
): void {
  writeFileSync(path, encodeEmbeddings(rows, cols, values))
}

export function readEmbeddings(path: string): {
  rows: number
  cols: number
  values: Float32Array
} {
  const blob = readFileSync(path)
  if (blob.length < 24 || blob.toString('ascii', 0, 4) !== EMBEDDING_MAGIC) {
    throw new Error(`${path}: not a TSPE file`)
  }
  const version = blob.readUInt32LE(4)
  if (version !== FORMAT_VERSION) {
    throw new Error(`${path}: unsupported version ${version}`)
  }
  const rows = Number(blob.readBigUInt64LE(8))
  const cols = Number(blob.readBigUInt64LE(16))
  const expected = 24 + rows * cols * 4
  if (blob.length !== expected) {
    throw new Error(`${path}: expected ${expected} bytes, got ${blob.length}`)
  }
  const values = new Float32Array(rows * cols)
  for (let i = 0; i < values.length; i++) {
    values[i] = blob.readFloatLE(24 + i * 4)
  }
  return { rows, cols, values }
}

export function encodeLabels(labels: Uint32Array): Buffer {
  if (labels.length === 0) throw new Error('empty labels')
  const header = Buffer.alloc(16)
  header.write(LABEL_MAGIC, 0, 'ascii')
  header.writeUInt32LE(FORMAT_VERSION, 4)
  header.writeBigUInt64LE(BigInt(labels.length), 8)
  const payload = Buffer.alloc(labels.length * 4)
  for (let i = 0; i < labels.length; i++) {
    payload.writeUInt32LE(labels[i], i * 4)
  }
  return Buffer.concat([header, payload])
}

export function writeLabels(path: string, labels: Uint32Array): void {
  writeFileSync(path, encodeLabels(labels))
}

export function readLabels(path: string): Uint32Array {
  const blob = readFileSync(path)
  if (blob.length < 16 || blob.toString('ascii', 0, 4) !== LABEL_MAGIC) {
    throw new Error(`${path}: not a TSPL file`)
  }
  const version = blob.readUInt32LE(4)
  if (version !== FORMAT_VERSION) {
    throw new Error(`${path}: unsupported version ${version}`)
  }
  const count = Number(blob.readBigUInt64LE(8))
  if (blob.length !== 16 + count * 4) {
    throw new Error(`${path}: truncated label payload`)
  }
  const labels = new Uint32Array(count)
  for (let i = 0; i < count; i++) {
    labels[i] = blob.readUInt32LE(16 + i * 4)
  }
  return labels
}
