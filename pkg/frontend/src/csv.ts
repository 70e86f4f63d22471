import fs from 'node:fs';

/** Parsed CSV with a header row; all cells are numbers except the columns
 *  listed in `textColumns`. The run logs never quote or escape fields. */
export interface Table {
    columns: string[];
    rows: Record<string, number | string>[];
}

export function parseCsv(text: string, textColumns: string[] = []): Table {
    const lines = text.split(/\r?\n/).filter(l => l.length > 0);
    if (lines.length === 0) throw new Error('empty CSV');
    const columns = lines[0].split(',');
    const rows = lines.slice(1).map(line => {
        const cells = line.split(',');
        if (cells.length !== columns.length) {
            throw new Error(`row width ${cells.length} != header width ${columns.length}`);
        }
        const row: Record<string, number | string> = {};
        columns.forEach((c, i) => {
            row[c] = textColumns.includes(c) ? cells[i] : Number(cells[i]);
        });
        return row;
    });
    return { columns, rows };
}

export function readCsv(path: string, textColumns: string[] = []): Table {
    return parseCsv(fs.readFileSync(path, 'utf-8'), textColumns);
}

export function column(table: Table, name: string): number[] {
    if (!table.columns.includes(name)) {
        throw new Error(`CSV schema mismatch: missing column '${name}' (have ${table.columns.join(',')})`);
    }
    return table.rows.map(r => {
        const v = r[name];
        if (typeof v !== 'number' || Number.isNaN(v)) {
            throw new Error(`non-numeric value in column '${name}'`);
        }
        return v;
    });
}
