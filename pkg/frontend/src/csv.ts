import fs from 'fs';
import Papa from 'papaparse';

/** Exact header contract of the simulator's sweep CSVs. */
export const CSV_HEADER = 'sweep_value,p_g,p_g_pert,trace_defect,min_eigenvalue';

export interface SweepData {
  path: string;
  sweepValue: number[];
  pG: number[];
  /** First-order column; null when the simulator left it empty. */
  pGPert: (number | null)[];
}

export class CsvContractError extends Error {}

/**
 * Parse one sweep CSV, validating the header and refusing files with any
 * parse warning. Errors always name the offending file.
 */
export function readSweepCsv(path: string): SweepData {
  if (!fs.existsSync(path)) {
    throw new CsvContractError(`missing CSV: ${path}`);
  }
  const text = fs.readFileSync(path, 'utf8');
  const firstLine = text.split('\n', 1)[0].trim();
  if (firstLine !== CSV_HEADER) {
    throw new CsvContractError(
      `malformed CSV ${path}: header ${JSON.stringify(firstLine)} does not match contract`,
    );
  }
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new CsvContractError(
      `malformed CSV ${path}: row ${first.row}: ${first.message}`,
    );
  }
  const sweepValue: number[] = [];
  const pG: number[] = [];
  const pGPert: (number | null)[] = [];
  parsed.data.forEach((row, i) => {
    const x = Number(row.sweep_value);
    const y = Number(row.p_g);
    if (!Number.isFinite(x) || !Number.isFinite(y)) {
      throw new CsvContractError(`malformed CSV ${path}: non-numeric data in row ${i + 1}`);
    }
    sweepValue.push(x);
    pG.push(y);
    const pert = row.p_g_pert ?? '';
    if (pert === '') {
      pGPert.push(null);
    } else {
      const p = Number(pert);
      if (!Number.isFinite(p)) {
        throw new CsvContractError(
          `malformed CSV ${path}: non-numeric p_g_pert in row ${i + 1}`,
        );
      }
      pGPert.push(p);
    }
  });
  if (sweepValue.length === 0) {
    throw new CsvContractError(`malformed CSV ${path}: no data rows`);
  }
  return { path, sweepValue, pG, pGPert };
}
