/* tslint:disable */
/* eslint-disable */

/**
 * Random line instance chased online and solved offline. Returns server
 * paths for both, per-step request profiles and the competitive bound.
 */
export function chase_line_demo(seed: number, k: number, horizon: number, family: string): string;

/**
 * The four convex sets of a planar gadget and the classification of the
 * two-server positions meeting all of them on a lattice.
 */
export function gadget_feasibility(a1: number, a2: number, b1: number, b2: number, resolution: number): string;

/**
 * Whether servers at `(x1, y1)` and `(x2, y2)` meet every set of the gadget.
 */
export function gadget_meets(a1: number, a2: number, b1: number, b2: number, x1: number, y1: number, x2: number, y2: number): string;

/**
 * Hedge over k-subsets of an even grid on `[0, 1]` against the
 * three-point quadratic instance. Returns the regret curve and the
 * reference `sqrt(t ln N / 2)`.
 */
export function hedge_regret_curve(seed: number, k: number, grid_points: number, horizon: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly chase_line_demo: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly gadget_feasibility: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly gadget_meets: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number];
    readonly hedge_regret_curve: (a: number, b: number, c: number, d: number) => [number, number];
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
