import { curveReport, Metric, RunSet } from './curves.js';
import { lambdaDistReport } from './lambdadist.js';
import { lambdaTrackMap } from './lambdamap.js';
import { scatterReport, SummarySet } from './scatter.js';

const USAGE = `usage:
  report curves     --metric return|cum_failures --in label=dir1,dir2 ... --out fig.svg
  report scatter    --in label=summary1.json,summary2.json ... --out fig.svg
  report lambda-map --track track.json --trace trace.csv [--lambda-min v] [--lambda-max v] --out fig.svg
  report lambda-dist --in rundir --out fig.svg`;

interface Args {
    positional: string[];
    flags: Map<string, string[]>;
}

export function parseArgs(argv: string[]): Args {
    const positional: string[] = [];
    const flags = new Map<string, string[]>();
    let current: string | null = null;
    for (const a of argv) {
        if (a.startsWith('--')) {
            current = a.slice(2);
            if (!flags.has(current)) flags.set(current, []);
        } else if (current) {
            flags.get(current)!.push(a);
        } else {
            positional.push(a);
        }
    }
    return { positional, flags };
}

function labeled(values: string[]): { label: string; items: string[] }[] {
    return values.map(v => {
        const eq = v.indexOf('=');
        if (eq < 0) throw new Error(`expected label=path[,path...], got '${v}'`);
        return { label: v.slice(0, eq), items: v.slice(eq + 1).split(',') };
    });
}

function single(args: Args, name: string): string {
    const vals = args.flags.get(name);
    if (!vals || vals.length !== 1) throw new Error(`--${name} needs exactly one value`);
    return vals[0];
}

export function main(argv: string[]): number {
    const args = parseArgs(argv);
    const cmd = args.positional[0];
    try {
        if (cmd === 'curves') {
            const metric = single(args, 'metric') as Metric;
            if (metric !== 'return' && metric !== 'cum_failures') {
                throw new Error(`unknown metric '${metric}'`);
            }
            const sets: RunSet[] = labeled(args.flags.get('in') ?? [])
                .map(l => ({ label: l.label, dirs: l.items }));
            if (sets.length === 0) throw new Error('no --in runsets');
            curveReport(sets, metric, single(args, 'out'));
        } else if (cmd === 'scatter') {
            const sets: SummarySet[] = labeled(args.flags.get('in') ?? [])
                .map(l => ({ label: l.label, files: l.items }));
            if (sets.length === 0) throw new Error('no --in summaries');
            scatterReport(sets, single(args, 'out'));
        } else if (cmd === 'lambda-map') {
            const lamMin = args.flags.has('lambda-min') ? Number(single(args, 'lambda-min')) : 0.2;
            const lamMax = args.flags.has('lambda-max') ? Number(single(args, 'lambda-max')) : 1.0;
            lambdaTrackMap(single(args, 'track'), single(args, 'trace'),
                single(args, 'out'), lamMin, lamMax);
        } else if (cmd === 'lambda-dist') {
            lambdaDistReport(single(args, 'in'), single(args, 'out'));
        } else {
            console.error(USAGE);
            return 2;
        }
    } catch (e) {
        console.error(JSON.stringify({ error: (e as Error).message }));
        return 1;
    }
    return 0;
}

if (process.argv[1] && (process.argv[1].endsWith('cli.ts') || process.argv[1].endsWith('cli.js'))) {
    process.exit(main(process.argv.slice(2)));
}
