import { FigureSpec, FigureSpecError, LineStyle } from './figures';
import { readSweepCsv } from './csv';

/** One drawable curve extracted from the CSVs. */
export interface SeriesModel {
  name: string;
  lineType: LineStyle;
  points: [number, number][];
}

/**
 * The deterministic plot data model: what gets drawn, before any
 * renderer-specific styling. Rebuilding from identical inputs yields a
 * deep-equal structure.
 */
export interface FigureModel {
  name: string;
  xLabel: string;
  yLabel: string;
  yRange: [number, number];
  series: SeriesModel[];
  referenceLine?: number;
}

export function buildFigureModel(spec: FigureSpec): FigureModel {
  if (spec.panels.length === 0) {
    throw new FigureSpecError(`figure ${spec.name}: empty panel list`);
  }
  const series: SeriesModel[] = [];
  for (const panel of spec.panels) {
    const data = readSweepCsv(panel.csvPath);
    series.push({
      name: panel.label,
      lineType: panel.lineStyle,
      points: data.sweepValue.map((x, i) => [x, data.pG[i]]),
    });
    if (data.pGPert.some((v) => v !== null)) {
      series.push({
        name: `${panel.label} (first order)`,
        lineType: 'dashed',
        points: data.sweepValue.flatMap((x, i) =>
          data.pGPert[i] === null ? [] : [[x, data.pGPert[i]] as [number, number]],
        ),
      });
    }
  }
  return {
    name: spec.name,
    xLabel: 'gT',
    yLabel: 'P_g',
    yRange: [0, 1.05],
    series,
    referenceLine: spec.referenceLine,
  };
}

/** Map the figure model onto an echarts option object. */
export function toChartOption(model: FigureModel): Record<string, unknown> {
  const series = model.series.map((s, i) => {
    const entry: Record<string, unknown> = {
      name: s.name,
      type: 'line',
      data: s.points,
      showSymbol: false,
      lineStyle: { type: s.lineType, width: 1.5 },
    };
    if (i === 0 && model.referenceLine !== undefined) {
      entry.markLine = {
        silent: true,
        symbol: 'none',
        lineStyle: { type: 'dashed', color: '#888' },
        data: [{ yAxis: model.referenceLine }],
      };
    }
    return entry;
  });
  return {
    animation: false,
    title: { text: model.name },
    legend: { data: model.series.map((s) => s.name), bottom: 0 },
    xAxis: { type: 'value', name: model.xLabel },
    yAxis: { type: 'value', name: model.yLabel, min: model.yRange[0], max: model.yRange[1] },
    series,
  };
}
