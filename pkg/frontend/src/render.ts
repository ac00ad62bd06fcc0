import fs from 'fs';
import * as echarts from 'echarts';

import { FigureModel, toChartOption } from './model';

export interface RenderOptions {
  width?: number;
  height?: number;
}

/** Server-side SVG rendering; no DOM involved. */
export function renderSvg(model: FigureModel, opts: RenderOptions = {}): string {
  const chart = echarts.init(null, null, {
    renderer: 'svg',
    ssr: true,
    width: opts.width ?? 900,
    height: opts.height ?? 560,
  });
  try {
    chart.setOption(toChartOption(model));
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}

export function renderToFile(model: FigureModel, outPath: string, opts: RenderOptions = {}): void {
  fs.writeFileSync(outPath, renderSvg(model, opts), 'utf8');
}
