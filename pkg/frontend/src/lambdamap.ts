import fs from 'node:fs';

import { column, readCsv } from './csv.js';
import { Figure, weightColor } from './svg.js';

interface TrackFile {
    version: number;
    points: [number, number][];
    half_width: number[];
}

export function loadTrack(path: string): TrackFile {
    const d = JSON.parse(fs.readFileSync(path, 'utf-8'));
    if (d.version !== 1 || !Array.isArray(d.points)) {
        throw new Error(`unsupported track file ${path}`);
    }
    return d;
}

export interface TracePath {
    xs: number[];
    ys: number[];
    lams: number[];
}

export function loadTrace(path: string): TracePath {
    const t = readCsv(path);
    return { xs: column(t, 'x'), ys: column(t, 'y'), lams: column(t, 'lambda') };
}

export function pathLength(xs: number[], ys: number[]): number {
    let total = 0;
    for (let i = 1; i < xs.length; i++) {
        total += Math.hypot(xs[i] - xs[i - 1], ys[i] - ys[i - 1]);
    }
    return total;
}

/** Track outline with the driven path colored by the blending weight. */
export function lambdaTrackMap(trackPath: string, tracePath: string,
                               outPath: string, lamMin = 0.2, lamMax = 1.0): void {
    const track = loadTrack(trackPath);
    const trace = loadTrace(tracePath);
    const px = track.points.map(p => p[0]);
    const py = track.points.map(p => p[1]);
    const pad = Math.max(...track.half_width) + 2;
    const fig = new Figure({
        xMin: Math.min(...px) - pad, xMax: Math.max(...px) + pad,
        yMin: Math.min(...py) - pad, yMax: Math.max(...py) + pad,
    }, 640, 560, 'Blending weight along the driven path');

    // track boundaries from centerline + normal offsets
    const n = track.points.length;
    const left: string[] = [];
    const right: string[] = [];
    for (let i = 0; i < n; i++) {
        const [x0, y0] = track.points[i];
        const [x1, y1] = track.points[(i + 1) % n];
        const len = Math.hypot(x1 - x0, y1 - y0) || 1;
        const nx = -(y1 - y0) / len;
        const ny = (x1 - x0) / len;
        const w = track.half_width[i];
        left.push(`${fig.x(x0 + nx * w)},${fig.y(y0 + ny * w)}`);
        right.push(`${fig.x(x0 - nx * w)},${fig.y(y0 - ny * w)}`);
    }
    for (const pts of [left, right]) {
        fig.raw(`<polygon points="${pts.join(' ')}" fill="none" stroke="#555" stroke-width="1"/>`);
    }

    for (let i = 1; i < trace.xs.length; i++) {
        const color = weightColor(trace.lams[i], lamMin, lamMax);
        fig.segment(trace.xs[i - 1], trace.ys[i - 1], trace.xs[i], trace.ys[i],
            color, 3, ` data-lambda="${trace.lams[i]}"`);
    }

    // color legend with the configured weight bounds
    const steps = 24;
    for (let i = 0; i < steps; i++) {
        const v = lamMin + (lamMax - lamMin) * i / (steps - 1);
        fig.raw(`<rect x="${500 + i * 4}" y="40" width="4" height="12" fill="${weightColor(v, lamMin, lamMax)}"/>`);
    }
    fig.raw(`<text x="498" y="64" font-size="10" font-family="sans-serif" text-anchor="middle" data-legend="min">${lamMin}</text>`);
    fig.raw(`<text x="${500 + steps * 4}" y="64" font-size="10" font-family="sans-serif" text-anchor="middle" data-legend="max">${lamMax}</text>`);
    fs.writeFileSync(outPath, fig.render());
}
