import fs from 'node:fs';
import path from 'node:path';

import { column, readCsv } from './csv.js';
import { Figure } from './svg.js';

/** Density of the per-step blending weight over training, as a step x
 *  weight heatmap (counts normalized per step bucket). */
export function lambdaHistogram(dir: string, stepBuckets = 60, lamBuckets = 25):
    { counts: number[][]; maxStep: number } {
    const t = readCsv(path.join(dir, 'steps.csv'));
    const steps = column(t, 'step');
    const lams = column(t, 'lambda');
    const maxStep = steps[steps.length - 1];
    const counts: number[][] = Array.from({ length: stepBuckets },
        () => new Array(lamBuckets).fill(0));
    for (let i = 0; i < steps.length; i++) {
        const sb = Math.min(stepBuckets - 1, Math.floor(steps[i] / (maxStep + 1) * stepBuckets));
        const lb = Math.min(lamBuckets - 1, Math.max(0, Math.floor(lams[i] * lamBuckets)));
        counts[sb][lb]++;
    }
    for (const row of counts) {
        const total = row.reduce((a, b) => a + b, 0) || 1;
        for (let j = 0; j < row.length; j++) row[j] /= total;
    }
    return { counts, maxStep };
}

export function lambdaDistReport(dir: string, outPath: string): void {
    const { counts, maxStep } = lambdaHistogram(dir);
    const fig = new Figure({ xMin: 0, xMax: maxStep, yMin: 0, yMax: 1 }, 640, 420,
        'Weight distribution over training');
    fig.axes('environment step', 'blending weight');
    const sb = counts.length;
    const lb = counts[0].length;
    for (let i = 0; i < sb; i++) {
        for (let j = 0; j < lb; j++) {
            const d = counts[i][j];
            if (d === 0) continue;
            const x0 = fig.x(maxStep * i / sb);
            const x1 = fig.x(maxStep * (i + 1) / sb);
            const y0 = fig.y((j + 1) / lb);
            const y1 = fig.y(j / lb);
            const shade = Math.round(245 - 215 * Math.min(1, d * 4));
            fig.raw(`<rect x="${x0.toFixed(2)}" y="${y0.toFixed(2)}" width="${(x1 - x0).toFixed(2)}" height="${(y1 - y0).toFixed(2)}" fill="rgb(${shade},${shade},255)"/>`);
        }
    }
    fs.writeFileSync(outPath, fig.render());
}
