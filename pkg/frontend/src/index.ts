export { CSV_HEADER, CsvContractError, readSweepCsv, SweepData } from './csv';
export { FIGURES, FigureName, FigureSpec, FigureSpecError, Panel, figureSpec } from './figures';
export { FigureModel, SeriesModel, buildFigureModel, toChartOption } from './model';
export { renderSvg, renderToFile } from './render';
export { main, plotFigure } from './cli';
