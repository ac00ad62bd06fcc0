import fs from 'fs';
import path from 'path';

export type LineStyle = 'solid' | 'dashed' | 'dotted';

export interface Panel {
  csvPath: string;
  label: string;
  lineStyle: LineStyle;
}

export interface FigureSpec {
  name: string;
  panels: Panel[];
  /** Horizontal reference level (the phase-insensitive cos^2(pi/4) = 0.5). */
  referenceLine?: number;
}

export const FIGURES = ['fig1a', 'fig1b', 'fig2a', 'fig2b'] as const;
export type FigureName = (typeof FIGURES)[number];

export class FigureSpecError extends Error {}

function requireFile(dataDir: string, name: string): string {
  const p = path.join(dataDir, name);
  if (!fs.existsSync(p)) {
    throw new FigureSpecError(`missing CSV: ${p}`);
  }
  return p;
}

/**
 * Resolve the canonical simulator output files for a figure. fig1a picks
 * up every decay ratio present (fig1a_kappa_*.csv); the others use fixed
 * file names.
 */
export function figureSpec(figure: FigureName, dataDir: string): FigureSpec {
  if (figure === 'fig1a') {
    const files = fs
      .readdirSync(dataDir)
      .filter((f) => /^fig1a_kappa_.*\.csv$/.test(f))
      .sort();
    if (files.length === 0) {
      throw new FigureSpecError(
        `missing CSV: no fig1a_kappa_*.csv in ${dataDir} (run: jc-echo preset fig1a)`,
      );
    }
    return {
      name: figure,
      panels: files.map((f) => ({
        csvPath: path.join(dataDir, f),
        label: f.replace(/^fig1a_kappa_(.*)\.csv$/, 'kappa/g = $1'),
        lineStyle: 'solid',
      })),
    };
  }
  if (figure === 'fig1b') {
    return {
      name: figure,
      panels: [
        {
          csvPath: requireFile(dataDir, 'fig1b_superposition.csv'),
          label: '(|2> + i|3>)/sqrt(2)',
          lineStyle: 'solid',
        },
        {
          csvPath: requireFile(dataDir, 'fig1b_fock2.csv'),
          label: '|2>',
          lineStyle: 'dashed',
        },
        {
          csvPath: requireFile(dataDir, 'fig1b_coherent.csv'),
          label: 'coherent (1+i)/2',
          lineStyle: 'dotted',
        },
      ],
    };
  }
  const label =
    figure === 'fig2a' ? '(|2> + i|3>)/sqrt(2), Ramsey phi=pi/4' : 'coherent (1+i)/2, Ramsey phi=pi/4';
  return {
    name: figure,
    panels: [{ csvPath: requireFile(dataDir, `${figure}.csv`), label, lineStyle: 'solid' }],
    referenceLine: 0.5,
  };
}
