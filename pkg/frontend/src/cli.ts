#!/usr/bin/env node
import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';

import { CsvContractError } from './csv';
import { FIGURES, FigureName, FigureSpecError, figureSpec } from './figures';
import { buildFigureModel } from './model';
import { renderToFile } from './render';

export function plotFigure(figure: FigureName, dataDir: string, out: string): void {
  const model = buildFigureModel(figureSpec(figure, dataDir));
  renderToFile(model, out);
}

export function main(argv: string[]): number {
  const args = yargs(argv)
    .scriptName('plot_figures')
    .command('$0 <figure>', 'render one figure from simulator CSVs', (y) =>
      y.positional('figure', { choices: FIGURES, demandOption: true }),
    )
    .option('data-dir', {
      type: 'string',
      demandOption: true,
      describe: 'directory holding the jc-echo preset CSVs',
    })
    .option('out', {
      type: 'string',
      demandOption: true,
      describe: 'output image path (SVG)',
    })
    .strict()
    .exitProcess(false)
    .parseSync();

  try {
    plotFigure(args.figure as FigureName, args['data-dir'], args.out);
    console.log(args.out);
    return 0;
  } catch (err) {
    if (err instanceof CsvContractError || err instanceof FigureSpecError) {
      console.error(String(err.message));
      return 1;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(hideBin(process.argv)));
}
