/** Builders for tiny synthetic dataset files in the real binary layouts. */

export interface CifarRecord {
  label: number
  /** fills the whole image with this base value per channel + index jitter */
  rgb: [number, number, number]
}

const CIFAR_PLANE = 32 * 32

/** CIFAR-10 batch bytes: [label u8 | R plane | G plane | B plane] each. */
export function cifar10Bytes(records: CifarRecord[]): Buffer {
  const out = Buffer.alloc(records.length * (1 + 3 * CIFAR_PLANE))
  records.forEach((rec, i) => {
    const base = i * (1 + 3 * CIFAR_PLANE)
    out[base] = rec.label
    for (let ch = 0; ch < 3; ch++) {
      for (let p = 0; p < CIFAR_PLANE; p++) {
        out[base + 1 + ch * CIFAR_PLANE + p] = clampByte(
          rec.rgb[ch] + ((p * 37 + ch * 11 + i * 7) % 13) - 6,
        )
      }
    }
  })
  return out
}

/** CIFAR-100 bytes: [coarse u8 | fine u8 | planes]. */
export function cifar100Bytes(
  records: (CifarRecord & { coarse: number })[],
): Buffer {
  const out = Buffer.alloc(records.length * (2 + 3 * CIFAR_PLANE))
  records.forEach((rec, i) => {
    const base = i * (2 + 3 * CIFAR_PLANE)
    out[base] = rec.coarse
    out[base + 1] = rec.label
    for (let ch = 0; ch < 3; ch++) {
      for (let p = 0; p < CIFAR_PLANE; p++) {
        out[base + 2 + ch * CIFAR_PLANE + p] = clampByte(rec.rgb[ch] + (p % 5))
      }
    }
  })
  return out
}

const STL_PLANE = 96 * 96

/** STL-10 image bytes: per image, 3 channel planes, column-major. */
export function stl10Bytes(records: CifarRecord[]): {
  images: Buffer
  labels: Buffer
} {
  const images = Buffer.alloc(records.length * 3 * STL_PLANE)
  const labels = Buffer.alloc(records.length)
  records.forEach((rec, i) => {
    labels[i] = rec.label + 1 // 1-based on disk
    const base = i * 3 * STL_PLANE
    for (let ch = 0; ch < 3; ch++) {
      for (let col = 0; col < 96; col++) {
        for (let row = 0; row < 96; row++) {
          images[base + ch * STL_PLANE + col * 96 + row] = clampByte(
            rec.rgb[ch] + ((row + col) % 9),
          )
        }
      }
    }
  })
  return { images, labels }
}

function clampByte(v: number): number {
  return Math.max(0, Math.min(255, Math.round(v)))
}
