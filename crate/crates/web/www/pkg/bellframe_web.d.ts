/* tslint:disable */
/* eslint-disable */

/**
 * Full CHSH run for one model and geometry; `settings` is `[a1, a2, b1, b2]`.
 */
export function chsh_experiment(model: string, source_z: number, alice_z: number, bob_z: number, alice_beta: number, bob_beta: number, settings: Float64Array, trials: number, seed: number): string;

/**
 * `E(0, θ)` for θ in `[0, π]`: closed form next to a Monte Carlo estimate.
 */
export function correlation_curve(model: string, timing: string, points: number, trials: number, seed: number): string;

/**
 * Measurement events, their times in both apparatus frames and the timing class.
 */
export function timing_diagram(source_z: number, alice_z: number, bob_z: number, alice_beta: number, bob_beta: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly chsh_experiment: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number, k: number) => [number, number];
    readonly correlation_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number];
    readonly timing_diagram: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
