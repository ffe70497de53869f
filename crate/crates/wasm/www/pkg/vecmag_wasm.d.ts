/* tslint:disable */
/* eslint-disable */

/**
 * Echo-squeezed fringe: upper-state fraction versus phase on `[−span, span]`.
 */
export function gesp_fringe(n: number, mu: number, variant_name: string, span: number, points: number): Float64Array;

/**
 * `1/Δφ` at the best operating phase for μ on `[mu_min, π/2]`.
 */
export function sensitivity_curve(n: number, variant_name: string, mu_min: number, points: number): Float64Array;

/**
 * Single Blackman π-pulse spectrum over ±1.5 ω_Z. `b_microtesla` sets ω_Z;
 * the pulse length keeps ω_Z·T_p = 100π. Detunings are returned in units
 * of ω_Z.
 */
export function spectrum(theta: number, b_microtesla: number, points: number): Float64Array;

/**
 * Version string of the simulator.
 */
export function version(): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly gesp_fringe: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly sensitivity_curve: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly spectrum: (a: number, b: number, c: number) => [number, number, number, number];
    readonly version: () => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
