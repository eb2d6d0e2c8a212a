/**
 * Minimal NPY v1.0 writer for 2-D little-endian float arrays, C-order.
 * Matches what the analysis toolkit's dataset loader accepts.
 */

const MAGIC = Buffer.from('\x93NUMPY', 'latin1');

export type FloatDtype = 'float32' | 'float64';

export function npyBytes(
  rows: number,
  cols: number,
  data: Float64Array,
  dtype: FloatDtype = 'float64',
): Buffer {
  if (data.length !== rows * cols) {
    throw new Error(`data length ${data.length} != ${rows}x${cols}`);
  }
  const descr = dtype === 'float64' ? '<f8' : '<f4';
  let header = `{'descr': '${descr}', 'fortran_order': False, 'shape': (${rows}, ${cols}), }`;
  // pad so magic(6) + version(2) + headerLen(2) + header is a multiple of 64
  const base = MAGIC.length + 2 + 2;
  const total = Math.ceil((base + header.length + 1) / 64) * 64;
  header = header.padEnd(total - base - 1, ' ') + '\n';

  const head = Buffer.alloc(base + header.length);
  MAGIC.copy(head, 0);
  head[6] = 1; // major version
  head[7] = 0; // minor version
  head.writeUInt16LE(header.length, 8);
  head.write(header, 10, 'latin1');

  const itemSize = dtype === 'float64' ? 8 : 4;
  const body = Buffer.alloc(rows * cols * itemSize);
  for (let i = 0; i < data.length; i++) {
    if (dtype === 'float64') {
      body.writeDoubleLE(data[i], i * 8);
    } else {
      body.writeFloatLE(data[i], i * 4);
    }
  }
  return Buffer.concat([head, body]);
}

/** Parse an NPY v1.0 buffer back (for round-trip tests). */
export function parseNpy(buf: Buffer): {
  shape: [number, number];
  dtype: FloatDtype;
  data: Float64Array;
} {
  if (!buf.subarray(0, 6).equals(MAGIC)) {
    throw new Error('not an NPY file');
  }
  const headerLen = buf.readUInt16LE(8);
  const header = buf.subarray(10, 10 + headerLen).toString('latin1');
  const descr = /'descr':\s*'([^']+)'/.exec(header)?.[1];
  const shapeMatch = /'shape':\s*\((\d+),\s*(\d+)\)/.exec(header);
  if (!descr || !shapeMatch) {
    throw new Error(`unsupported NPY header: ${header}`);
  }
  const rows = parseInt(shapeMatch[1], 10);
  const cols = parseInt(shapeMatch[2], 10);
  const dtype: FloatDtype = descr === '<f8' ? 'float64' : 'float32';
  if (descr !== '<f8' && descr !== '<f4') {
    throw new Error(`unsupported dtype ${descr}`);
  }
  const body = buf.subarray(10 + headerLen);
  const data = new Float64Array(rows * cols);
  const itemSize = dtype === 'float64' ? 8 : 4;
  if (body.length < rows * cols * itemSize) {
    throw new Error('NPY body truncated');
  }
  for (let i = 0; i < data.length; i++) {
    data[i] = dtype === 'float64' ? body.readDoubleLE(i * 8) : body.readFloatLE(i * 4);
  }
  return { shape: [rows, cols], dtype, data };
}
