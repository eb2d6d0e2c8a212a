/**
 * Walk a labeled image directory (one subfolder per class), encode every
 * image, and emit one NPY embedding file per class plus a manifest.json
 * that the analysis toolkit can load directly.
 *
 * Ordering is fully deterministic: class folders and the files inside
 * them are processed in sorted (code point) order, so repeated runs over
 * the same tree produce byte-identical outputs.
 */
import * as fs from 'node:fs';
import * as path from 'node:path';
import { decodeImage, SUPPORTED_EXTENSIONS } from './image.js';
import type { Encoder } from './encoder.js';
import { npyBytes, type FloatDtype } from './npy.js';

export interface ExtractionJob {
  imageRoot: string;
  outDir: string;
  encoder: Encoder;
  datasetId?: string;
  dtype?: FloatDtype;
  /** skip unreadable images with a warning instead of failing the run */
  permissive?: boolean;
  log?: (message: string) => void;
}

export interface ClassResult {
  label: string;
  file: string;
  count: number;
  skipped: string[];
}

export interface ExtractionResult {
  manifestPath: string;
  datasetId: string;
  dim: number;
  classes: ClassResult[];
}

function listClassDirs(root: string): string[] {
  const entries = fs
    .readdirSync(root, { withFileTypes: true })
    .filter((e) => e.isDirectory())
    .map((e) => e.name)
    .sort();
  if (entries.length === 0) {
    throw new Error(`no class subdirectories found under ${root}`);
  }
  return entries;
}

function listImages(dir: string): string[] {
  return fs
    .readdirSync(dir, { withFileTypes: true })
    .filter((e) => e.isFile())
    .map((e) => e.name)
    .filter((name) => SUPPORTED_EXTENSIONS.some((ext) => name.toLowerCase().endsWith(ext)))
    .sort();
}

export function runExtraction(job: ExtractionJob): ExtractionResult {
  const {
    imageRoot,
    outDir,
    encoder,
    dtype = 'float64',
    permissive = false,
    log = () => {},
  } = job;
  const datasetId = job.datasetId ?? path.basename(path.resolve(imageRoot));
  if (!fs.existsSync(imageRoot) || !fs.statSync(imageRoot).isDirectory()) {
    throw new Error(`image root is not a directory: ${imageRoot}`);
  }
  fs.mkdirSync(outDir, { recursive: true });

  const classes: ClassResult[] = [];
  for (const label of listClassDirs(imageRoot)) {
    const classDir = path.join(imageRoot, label);
    const files = listImages(classDir);
    const rows: Float64Array[] = [];
    const skipped: string[] = [];
    for (const name of files) {
      const full = path.join(classDir, name);
      try {
        const image = decodeImage(fs.readFileSync(full), name);
        rows.push(encoder.encode(image));
      } catch (err) {
        if (!permissive) {
          throw new Error(`failed to read ${full}: ${(err as Error).message}`);
        }
        skipped.push(name);
        log(`warning: skipping unreadable image ${full}: ${(err as Error).message}`);
      }
    }
    if (rows.length === 0) {
      throw new Error(`class '${label}' has no readable images in ${classDir}`);
    }
    const flat = new Float64Array(rows.length * encoder.dim);
    rows.forEach((row, i) => flat.set(row, i * encoder.dim));
    const file = `${label}.npy`;
    fs.writeFileSync(path.join(outDir, file), npyBytes(rows.length, encoder.dim, flat, dtype));
    classes.push({ label, file, count: rows.length, skipped });
    log(`class ${label}: ${rows.length} images -> ${file}`);
  }

  const manifest = {
    dataset_id: datasetId,
    classes: classes.map(({ label, file }) => ({ label, file })),
    metadata: {
      encoder: encoder.name,
      dim: encoder.dim,
      preprocessing: encoder.preprocessing,
      dtype,
    },
  };
  const manifestPath = path.join(outDir, 'manifest.json');
  fs.writeFileSync(manifestPath, JSON.stringify(manifest, null, 2) + '\n');
  return { manifestPath, datasetId, dim: encoder.dim, classes };
}
