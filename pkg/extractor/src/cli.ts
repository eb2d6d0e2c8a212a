#!/usr/bin/env node
/** Command-line entry point: images in, manifest + NPY embeddings out. */
import { parseArgs } from 'node:util';
import { createEncoder } from './encoder.js';
import { runExtraction } from './extract.js';
import type { FloatDtype } from './npy.js';

const USAGE = `usage: classdiff-extract --images <dir> --out <dir> [options]

Encode a labeled image tree (one subfolder per class) into per-class NPY
embedding files plus a manifest.json consumable by the classdiff CLI.

options:
  --images <dir>      root directory with one subfolder per class (required)
  --out <dir>         output directory for manifest + NPY files (required)
  --encoder <name>    feature encoder to use (default: patch)
  --dataset-id <id>   dataset identifier (default: image root basename)
  --dtype <t>         float64 or float32 (default: float64)
  --permissive        skip unreadable images with a warning
  --quiet             suppress progress output
  --help              show this message
`;

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        images: { type: 'string' },
        out: { type: 'string' },
        encoder: { type: 'string', default: 'patch' },
        'dataset-id': { type: 'string' },
        dtype: { type: 'string', default: 'float64' },
        permissive: { type: 'boolean', default: false },
        quiet: { type: 'boolean', default: false },
        help: { type: 'boolean', default: false },
      },
    });
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n${USAGE}`);
    return 2;
  }
  const opts = parsed.values;
  if (opts.help) {
    process.stdout.write(USAGE);
    return 0;
  }
  if (!opts.images || !opts.out) {
    process.stderr.write(`error: --images and --out are required\n${USAGE}`);
    return 2;
  }
  if (opts.dtype !== 'float64' && opts.dtype !== 'float32') {
    process.stderr.write(`error: --dtype must be float64 or float32\n`);
    return 2;
  }
  try {
    const result = runExtraction({
      imageRoot: opts.images,
      outDir: opts.out,
      encoder: createEncoder(opts.encoder as string),
      datasetId: opts['dataset-id'],
      dtype: opts.dtype as FloatDtype,
      permissive: opts.permissive,
      log: opts.quiet ? () => {} : (m) => process.stderr.write(m + '\n'),
    });
    process.stdout.write(
      `wrote ${result.classes.length} classes (dim ${result.dim}) to ${result.manifestPath}\n`,
    );
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] && import.meta.url.endsWith(process.argv[1].split('/').pop() as string);
if (invokedDirectly) {
  process.exitCode = main(process.argv.slice(2));
}
