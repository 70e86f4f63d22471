import fs from 'node:fs';

import { mean } from './stats.js';
import { Figure, PALETTE } from './svg.js';

export interface SummarySet {
    label: string;
    files: string[];
}

interface Summary {
    final_return: number;
    cum_failures: number;
}

export function loadSummary(file: string): Summary {
    const d = JSON.parse(fs.readFileSync(file, 'utf-8'));
    if (typeof d.final_return !== 'number' || typeof d.cum_failures !== 'number') {
        throw new Error(`summary ${file} lacks final_return/cum_failures`);
    }
    return d;
}

export interface ScatterPoint {
    label: string;
    meanReturn: number;
    meanFails: number;
    seeds: { ret: number; fails: number }[];
}

export function scatterPoints(sets: SummarySet[]): ScatterPoint[] {
    if (sets.length === 0) throw new Error('no summaries given');
    return sets.map(s => {
        if (s.files.length === 0) throw new Error(`summary set '${s.label}' is empty`);
        const seeds = s.files.map(f => {
            const d = loadSummary(f);
            return { ret: d.final_return, fails: d.cum_failures };
        });
        return {
            label: s.label,
            meanReturn: mean(seeds.map(x => x.ret)),
            meanFails: mean(seeds.map(x => x.fails)),
            seeds,
        };
    });
}

/** Final return over training failures: per-seed markers + the mean point. */
export function scatterReport(sets: SummarySet[], outPath: string): void {
    const pts = scatterPoints(sets);
    const xs = pts.flatMap(p => p.seeds.map(s => s.fails).concat([p.meanFails]));
    const ys = pts.flatMap(p => p.seeds.map(s => s.ret).concat([p.meanReturn]));
    const fig = new Figure({
        xMin: Math.min(...xs), xMax: Math.max(...xs),
        yMin: Math.min(...ys), yMax: Math.max(...ys),
    }, 640, 420, 'Final return vs training failures');
    fig.axes('cumulative failures', 'final return');
    pts.forEach((p, i) => {
        const color = PALETTE[i % PALETTE.length];
        for (const s of p.seeds) fig.circle(s.fails, s.ret, 3, color, 0.45);
        fig.circle(p.meanFails, p.meanReturn, 6, color, 1);
    });
    fig.legend(pts.map((p, i) => ({ label: p.label, color: PALETTE[i % PALETTE.length] })));
    fs.writeFileSync(outPath, fig.render());
}
