/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const constant: (a: number) => [number, number];
export const convergence: (a: number, b: number, c: number) => [number, number];
export const smallest_with_divisors: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
