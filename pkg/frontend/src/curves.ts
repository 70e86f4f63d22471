import fs from 'node:fs';
import path from 'node:path';

import { column, readCsv } from './csv.js';
import { aggregate, Band, Curve } from './stats.js';
import { Figure, PALETTE } from './svg.js';

export type Metric = 'return' | 'cum_failures';

export interface RunSet {
    label: string;
    dirs: string[];
}

/** Pull one metric curve out of a run directory's logs. */
export function loadCurve(dir: string, metric: Metric): Curve {
    if (metric === 'return') {
        const t = readCsv(path.join(dir, 'eval.csv'));
        return { steps: column(t, 'step'), values: column(t, 'return') };
    }
    const t = readCsv(path.join(dir, 'episodes.csv'));
    return { steps: column(t, 'end_step'), values: column(t, 'cum_failures') };
}

export function runsetBand(rs: RunSet, metric: Metric): Band {
    if (rs.dirs.length === 0) throw new Error(`runset '${rs.label}' is empty`);
    return aggregate(rs.dirs.map(d => loadCurve(d, metric)));
}

/** Mean curve with the 95% band per algorithm, one SVG. */
export function curveReport(runsets: RunSet[], metric: Metric, outPath: string): void {
    const bands = runsets.map(rs => ({ rs, band: runsetBand(rs, metric) }));
    const xMin = Math.min(...bands.map(b => b.band.grid[0]));
    const xMax = Math.max(...bands.map(b => b.band.grid[b.band.grid.length - 1]));
    const yMin = Math.min(...bands.map(b => Math.min(...b.band.lo)));
    const yMax = Math.max(...bands.map(b => Math.max(...b.band.hi)));
    const fig = new Figure({ xMin, xMax, yMin, yMax }, 640, 420,
        metric === 'return' ? 'Evaluation return' : 'Cumulative training failures');
    fig.axes('environment step', metric === 'return' ? 'greedy return' : 'failures');
    bands.forEach(({ rs, band }, i) => {
        const color = PALETTE[i % PALETTE.length];
        fig.band(band.grid, band.lo, band.hi, color);
        fig.polyline(band.grid, band.mean, color, 1.8, ` data-series="${rs.label}"`);
    });
    fig.legend(bands.map(({ rs }, i) => ({ label: `${rs.label} (n=${rs.dirs.length})`, color: PALETTE[i % PALETTE.length] })));
    fs.writeFileSync(outPath, fig.render());
}
