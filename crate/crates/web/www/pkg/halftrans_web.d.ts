/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Polygons with every connection of squared length at most `len2`.
     */
    connections_svg(len2: string): string;
    /**
     * JSON summary of the same decomposition.
     */
    cylinders_json(dir: string): string;
    /**
     * Cylinder bands and parallel connections in the direction `"x,y"`.
     */
    cylinders_svg(dir: string): string;
    /**
     * Current edge ids, in the order `flip` indexes them.
     */
    edges(): string;
    flip_count(): number;
    /**
     * Flips edge `k`; returns the new edge id, or an error when the
     * quadrilateral around it is not strictly convex.
     */
    flip(k: number): string;
    info(): string;
    constructor(name: string);
    reset(): void;
    triangulation_svg(): string;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_connections_svg: (a: number, b: number, c: number) => [number, number, number, number];
    readonly demo_cylinders_json: (a: number, b: number, c: number) => [number, number, number, number];
    readonly demo_cylinders_svg: (a: number, b: number, c: number) => [number, number, number, number];
    readonly demo_edges: (a: number) => [number, number];
    readonly demo_flip: (a: number, b: number) => [number, number, number, number];
    readonly demo_flip_count: (a: number) => number;
    readonly demo_info: (a: number) => [number, number];
    readonly demo_new: (a: number, b: number) => [number, number, number];
    readonly demo_reset: (a: number) => [number, number];
    readonly demo_triangulation_svg: (a: number) => [number, number];
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
