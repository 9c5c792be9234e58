/* tslint:disable */
/* eslint-disable */

/**
 * Log-scale plot of the directional cost along the anisotropic to
 * isotropic to anisotropic path for the three metrics.
 */
export function cost_profile_svg(method: string): string;

/**
 * Glyph strip between a fiber tensor and its copy rotated by `angle_deg`:
 * log-Euclidean on the bottom row, spectral-quaternion on the top. Returns
 * JSON `{svg, ha_loge, ha_sq}` with the HA of each row.
 */
export function interpolation_strip(angle_deg: number): string;

/**
 * Trace the preset's seed region on a phantom, optionally re-fitted from
 * noisy signals. Returns JSON `{svg, hit_fraction, hit_count, n_tracks}`.
 */
export function trace_phantom(shape: string, metric: string, p: number, hybrid: boolean, noise: number, seed: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly cost_profile_svg: (a: number, b: number) => [number, number, number, number];
    readonly interpolation_strip: (a: number) => [number, number, number, number];
    readonly trace_phantom: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
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
