/** Image decoding: PNG via pngjs, plus binary PPM/PGM for fixture-friendly IO. */
import { PNG } from 'pngjs';

export interface RgbImage {
  width: number;
  height: number;
  /** row-major RGB triples in [0, 255] */
  pixels: Uint8Array;
}

export const SUPPORTED_EXTENSIONS = ['.png', '.ppm', '.pgm'];

export function decodeImage(bytes: Buffer, filename: string): RgbImage {
  const lower = filename.toLowerCase();
  if (lower.endsWith('.png')) return decodePng(bytes);
  if (lower.endsWith('.ppm') || lower.endsWith('.pgm')) return decodePnm(bytes);
  throw new Error(`unsupported image format: ${filename}`);
}

function decodePng(bytes: Buffer): RgbImage {
  const png = PNG.sync.read(bytes);
  const pixels = new Uint8Array(png.width * png.height * 3);
  for (let i = 0; i < png.width * png.height; i++) {
    pixels[i * 3] = png.data[i * 4];
    pixels[i * 3 + 1] = png.data[i * 4 + 1];
    pixels[i * 3 + 2] = png.data[i * 4 + 2];
  }
  return { width: png.width, height: png.height, pixels };
}

/** Binary P6 (RGB) and P5 (grayscale), 8-bit only. */
function decodePnm(bytes: Buffer): RgbImage {
  const magic = bytes.subarray(0, 2).toString('ascii');
  if (magic !== 'P6' && magic !== 'P5') {
    throw new Error(`unsupported PNM magic ${magic} (only binary P5/P6)`);
  }
  let pos = 2;
  const fields: number[] = [];
  while (fields.length < 3) {
    // skip whitespace and comment lines
    while (pos < bytes.length && /\s/.test(String.fromCharCode(bytes[pos]))) pos++;
    if (bytes[pos] === 0x23) {
      while (pos < bytes.length && bytes[pos] !== 0x0a) pos++;
      continue;
    }
    let start = pos;
    while (pos < bytes.length && !/\s/.test(String.fromCharCode(bytes[pos]))) pos++;
    fields.push(parseInt(bytes.subarray(start, pos).toString('ascii'), 10));
  }
  pos++; // single whitespace after maxval
  const [width, height, maxval] = fields;
  if (!(width > 0) || !(height > 0)) throw new Error('bad PNM dimensions');
  if (maxval !== 255) throw new Error(`unsupported PNM maxval ${maxval}`);
  const channels = magic === 'P6' ? 3 : 1;
  const expected = width * height * channels;
  if (bytes.length - pos < expected) throw new Error('PNM body truncated');
  const pixels = new Uint8Array(width * height * 3);
  for (let i = 0; i < width * height; i++) {
    if (channels === 3) {
      pixels[i * 3] = bytes[pos + i * 3];
      pixels[i * 3 + 1] = bytes[pos + i * 3 + 1];
      pixels[i * 3 + 2] = bytes[pos + i * 3 + 2];
    } else {
      const g = bytes[pos + i];
      pixels[i * 3] = g;
      pixels[i * 3 + 1] = g;
      pixels[i * 3 + 2] = g;
    }
  }
  return { width, height, pixels };
}

export function encodePpm(img: RgbImage): Buffer {
  const header = Buffer.from(`P6\n${img.width} ${img.height}\n255\n`, 'ascii');
  return Buffer.concat([header, Buffer.from(img.pixels)]);
}
