/* tslint:disable */
/* eslint-disable */

/**
 * Critical g_ab for Na exponentially bound a particles of unit mass plus
 * one b of mass `mb` (`mb <= 0` means a static source), holding g_aa:
 * `[Na, g_ab]` for Na = 1..=na_max.
 */
export function critical_gab_vs_na(mb: number, g_aa: number, na_max: number): Float64Array;

/**
 * Critical couplings of N bosons in their ground state for N = 2..=n_max:
 * `[N, plain, improved]` per N.
 */
export function critical_identical(well_name: string, n_max: number): Float64Array;

/**
 * Two-body energies of the (n, l) state on a grid of `points` couplings
 * from `g_min` to `g_max`, unit mass, mu = 1.
 *
 * Layout: `[g, plain, improved, numerical]` repeated per grid point.
 */
export function energy_curve(well_name: string, n: number, l: number, g_min: number, g_max: number, points: number): Float64Array;

/**
 * Critical g_aa for `na` a particles around a static source of strength h,
 * on a grid of `points` values of h: `[h, g_aa]` per point.
 */
export function static_source_curve(na: number, h_min: number, h_max: number, points: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly critical_gab_vs_na: (a: number, b: number, c: number) => [number, number, number, number];
    readonly critical_identical: (a: number, b: number, c: number) => [number, number, number, number];
    readonly energy_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly static_source_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
