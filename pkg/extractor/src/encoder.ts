/**
 * Feature encoders.  The built-in `patch` encoder is fully deterministic
 * and needs no model weights: it box-averages the image onto an 8x8 RGB
 * grid, scales to [0, 1] and appends a constant bias channel so no row
 * can be all zero.  Heavier pretrained encoders can be registered at
 * runtime; they only need to satisfy the Encoder interface.
 */
import type { RgbImage } from './image.js';

export interface Encoder {
  name: string;
  dim: number;
  /** descriptive preprocessing note recorded in the manifest metadata */
  preprocessing: string;
  encode(image: RgbImage): Float64Array;
}

const PATCH_GRID = 8;

export class PatchEncoder implements Encoder {
  name = 'patch';
  dim = PATCH_GRID * PATCH_GRID * 3 + 1;
  preprocessing = `box-average to ${PATCH_GRID}x${PATCH_GRID} RGB, scale to [0,1], constant bias 1`;

  encode(image: RgbImage): Float64Array {
    const out = new Float64Array(this.dim);
    const { width, height, pixels } = image;
    for (let gy = 0; gy < PATCH_GRID; gy++) {
      const y0 = Math.floor((gy * height) / PATCH_GRID);
      const y1 = Math.max(y0 + 1, Math.floor(((gy + 1) * height) / PATCH_GRID));
      for (let gx = 0; gx < PATCH_GRID; gx++) {
        const x0 = Math.floor((gx * width) / PATCH_GRID);
        const x1 = Math.max(x0 + 1, Math.floor(((gx + 1) * width) / PATCH_GRID));
        let r = 0;
        let g = 0;
        let b = 0;
        let n = 0;
        for (let y = y0; y < y1; y++) {
          for (let x = x0; x < x1; x++) {
            const p = (y * width + x) * 3;
            r += pixels[p];
            g += pixels[p + 1];
            b += pixels[p + 2];
            n++;
          }
        }
        const cell = (gy * PATCH_GRID + gx) * 3;
        out[cell] = r / n / 255;
        out[cell + 1] = g / n / 255;
        out[cell + 2] = b / n / 255;
      }
    }
    out[this.dim - 1] = 1.0; // bias channel: rows are never all-zero
    return out;
  }
}

const registry = new Map<string, () => Encoder>([['patch', () => new PatchEncoder()]]);

export function registerEncoder(name: string, factory: () => Encoder): void {
  registry.set(name, factory);
}

export function createEncoder(name: string): Encoder {
  const factory = registry.get(name);
  if (!factory) {
    const known = [...registry.keys()].sort().join(', ');
    throw new Error(`unknown encoder '${name}' (available: ${known})`);
  }
  return factory();
}
