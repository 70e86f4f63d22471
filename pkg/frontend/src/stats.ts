/** Curve aggregation across seeds: step alignment by linear interpolation,
 *  mean and the 95% normal-approximation confidence band. */

export interface Curve {
    steps: number[];
    values: number[];
}

export interface Band {
    grid: number[];
    mean: number[];
    lo: number[];
    hi: number[];
    n: number;
}

export function mean(xs: number[]): number {
    if (xs.length === 0) throw new Error('mean of empty list');
    return xs.reduce((a, b) => a + b, 0) / xs.length;
}

/** Sample standard deviation (n-1 normalization); 0 for a single value. */
export function sampleStd(xs: number[]): number {
    if (xs.length < 2) return 0;
    const m = mean(xs);
    return Math.sqrt(xs.reduce((a, b) => a + (b - m) ** 2, 0) / (xs.length - 1));
}

export function interp(xs: number[], ys: number[], x: number): number {
    if (xs.length === 0) throw new Error('empty curve');
    if (x <= xs[0]) return ys[0];
    if (x >= xs[xs.length - 1]) return ys[ys.length - 1];
    let i = 1;
    while (xs[i] < x) i++;
    const t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

/** Align runs on a shared grid and compute mean +- 1.96 * stderr. */
export function aggregate(curves: Curve[], gridSize = 200): Band {
    if (curves.length === 0) throw new Error('no curves to aggregate');
    for (const c of curves) {
        if (c.steps.length !== c.values.length || c.steps.length === 0) {
            throw new Error('malformed curve');
        }
    }
    const lo = Math.min(...curves.map(c => c.steps[0]));
    const hi = Math.max(...curves.map(c => c.steps[c.steps.length - 1]));
    const grid: number[] = [];
    const k = Math.min(gridSize, Math.max(...curves.map(c => c.steps.length)));
    for (let i = 0; i < k; i++) {
        grid.push(lo + (hi - lo) * (k === 1 ? 0 : i / (k - 1)));
    }
    const meanArr: number[] = [];
    const loArr: number[] = [];
    const hiArr: number[] = [];
    for (const g of grid) {
        const vals = curves.map(c => interp(c.steps, c.values, g));
        const m = mean(vals);
        const se = sampleStd(vals) / Math.sqrt(vals.length);
        meanArr.push(m);
        loArr.push(m - 1.96 * se);
        hiArr.push(m + 1.96 * se);
    }
    return { grid, mean: meanArr, lo: loArr, hi: hiArr, n: curves.length };
}
