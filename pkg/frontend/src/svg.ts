/** Tiny deterministic SVG builder: enough for line charts, bands, scatter
 *  plots and colored track paths. No DOM, just strings. */

export interface Extent {
    xMin: number; xMax: number; yMin: number; yMax: number;
}

export class Figure {
    readonly width: number;
    readonly height: number;
    readonly margin = { l: 58, r: 16, t: 30, b: 42 };
    private parts: string[] = [];
    private ext: Extent;

    constructor(ext: Extent, width = 640, height = 420, title = '') {
        this.width = width;
        this.height = height;
        // pad degenerate extents so scales stay finite
        const px = ext.xMax - ext.xMin || 1;
        const py = ext.yMax - ext.yMin || 1;
        this.ext = {
            xMin: ext.xMin - 0.02 * px, xMax: ext.xMax + 0.02 * px,
            yMin: ext.yMin - 0.05 * py, yMax: ext.yMax + 0.05 * py,
        };
        if (title) {
            this.parts.push(`<text x="${width / 2}" y="18" text-anchor="middle" font-size="14" font-family="sans-serif">${esc(title)}</text>`);
        }
    }

    x(v: number): number {
        const { l, r } = this.margin;
        return l + (v - this.ext.xMin) / (this.ext.xMax - this.ext.xMin) * (this.width - l - r);
    }

    y(v: number): number {
        const { t, b } = this.margin;
        return this.height - b - (v - this.ext.yMin) / (this.ext.yMax - this.ext.yMin) * (this.height - t - b);
    }

    axes(xLabel: string, yLabel: string): void {
        const { l, r, t, b } = this.margin;
        const x0 = l, x1 = this.width - r, y0 = this.height - b, y1 = t;
        this.parts.push(`<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#999"/>`);
        for (let i = 0; i <= 4; i++) {
            const vx = this.ext.xMin + (this.ext.xMax - this.ext.xMin) * i / 4;
            const vy = this.ext.yMin + (this.ext.yMax - this.ext.yMin) * i / 4;
            this.parts.push(`<text x="${this.x(vx)}" y="${y0 + 16}" text-anchor="middle" font-size="10" font-family="sans-serif">${fmt(vx)}</text>`);
            this.parts.push(`<text x="${x0 - 6}" y="${this.y(vy) + 3}" text-anchor="end" font-size="10" font-family="sans-serif">${fmt(vy)}</text>`);
        }
        this.parts.push(`<text x="${(x0 + x1) / 2}" y="${this.height - 8}" text-anchor="middle" font-size="12" font-family="sans-serif">${esc(xLabel)}</text>`);
        this.parts.push(`<text x="14" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="12" font-family="sans-serif" transform="rotate(-90 14 ${(y0 + y1) / 2})">${esc(yLabel)}</text>`);
    }

    polyline(xs: number[], ys: number[], stroke: string, width = 1.6, dataAttr = ''): void {
        const pts = xs.map((x, i) => `${round2(this.x(x))},${round2(this.y(ys[i]))}`).join(' ');
        this.parts.push(`<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${width}"${dataAttr}/>`);
    }

    band(xs: number[], lo: number[], hi: number[], fill: string): void {
        const fwd = xs.map((x, i) => `${round2(this.x(x))},${round2(this.y(hi[i]))}`);
        const back = [...xs].reverse().map((x, i) => `${round2(this.x(x))},${round2(this.y(lo[lo.length - 1 - i]))}`);
        this.parts.push(`<polygon points="${[...fwd, ...back].join(' ')}" fill="${fill}" fill-opacity="0.25" stroke="none"/>`);
    }

    circle(x: number, y: number, r: number, fill: string, opacity = 1): void {
        this.parts.push(`<circle cx="${round2(this.x(x))}" cy="${round2(this.y(y))}" r="${r}" fill="${fill}" fill-opacity="${opacity}"/>`);
    }

    segment(x1: number, y1: number, x2: number, y2: number, stroke: string, width: number, data = ''): void {
        this.parts.push(`<line x1="${round2(this.x(x1))}" y1="${round2(this.y(y1))}" x2="${round2(this.x(x2))}" y2="${round2(this.y(y2))}" stroke="${stroke}" stroke-width="${width}" stroke-linecap="round"${data}/>`);
    }

    legend(entries: { label: string; color: string }[]): void {
        const x = this.margin.l + 10;
        entries.forEach((e, i) => {
            const y = this.margin.t + 14 + i * 16;
            this.parts.push(`<rect x="${x}" y="${y - 8}" width="18" height="4" fill="${e.color}"/>`);
            this.parts.push(`<text x="${x + 24}" y="${y}" font-size="11" font-family="sans-serif">${esc(e.label)}</text>`);
        });
    }

    raw(s: string): void {
        this.parts.push(s);
    }

    render(): string {
        return `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" viewBox="0 0 ${this.width} ${this.height}">\n`
            + `<rect width="${this.width}" height="${this.height}" fill="white"/>\n`
            + this.parts.join('\n') + '\n</svg>\n';
    }
}

export const PALETTE = ['#1f77b4', '#d62728', '#2ca02c', '#ff7f0e', '#9467bd', '#8c564b', '#17becf'];

/** Blue -> red colormap over [lo, hi], the weight scale of the maps. */
export function weightColor(v: number, lo: number, hi: number): string {
    const t = Math.min(Math.max((v - lo) / (hi - lo || 1), 0), 1);
    const r = Math.round(40 + 200 * t);
    const g = Math.round(60 + 40 * (1 - Math.abs(t - 0.5) * 2));
    const b = Math.round(40 + 200 * (1 - t));
    return `rgb(${r},${g},${b})`;
}

function esc(s: string): string {
    return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

function fmt(v: number): string {
    if (Math.abs(v) >= 10000) return v.toExponential(1);
    return Number(v.toPrecision(3)).toString();
}

function round2(v: number): number {
    return Math.round(v * 100) / 100;
}
