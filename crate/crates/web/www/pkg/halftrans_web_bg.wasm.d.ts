/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const demo_connections_svg: (a: number, b: number, c: number) => [number, number, number, number];
export const demo_cylinders_json: (a: number, b: number, c: number) => [number, number, number, number];
export const demo_cylinders_svg: (a: number, b: number, c: number) => [number, number, number, number];
export const demo_edges: (a: number) => [number, number];
export const demo_flip: (a: number, b: number) => [number, number, number, number];
export const demo_flip_count: (a: number) => number;
export const demo_info: (a: number) => [number, number];
export const demo_new: (a: number, b: number) => [number, number, number];
export const demo_reset: (a: number) => [number, number];
export const demo_triangulation_svg: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
