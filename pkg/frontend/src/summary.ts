/** Reader for the simulator's summary/report JSON records. */

import { readFileSync } from "node:fs";

export interface RateTable {
  dim: number;
  alpha: number;
  r1: number;
  r2: number;
  incompressible: number | null;
  pu_valid: boolean;
  linf: number | null;
  grad_rho: number | null;
}

export interface Fit {
  quantity: string;
  exponent: number;
  stderr: number;
  reference: number | null;
  rel_deviation: number | null;
}

export interface Summary {
  format_version: number;
  command: string;
  rate_table?: RateTable;
  fits?: Fit[];
  [key: string]: unknown;
}

export function readSummary(path: string): Summary {
  const data = JSON.parse(readFileSync(path, "utf-8")) as Summary;
  if (typeof data.format_version !== "number") {
    throw new Error(`${path}: missing format_version`);
  }
  return data;
}

/** Reference decay exponent (negative) for a series quantity, straight from
 * the summary's rate table; null when the theory offers none. */
export function referenceRate(quantity: string, table: RateTable): number | null {
  switch (quantity) {
    case "L2_a":
      return -table.r1;
    case "L2_u":
      return -table.r2;
    case "L2_Pu":
      return table.pu_valid && table.incompressible !== null ? -table.incompressible : null;
    case "Linf_a":
    case "Linf_u":
      return table.linf === null ? null : -table.linf;
    case "L2_grad_a":
    case "L2_Lam_alpha_u":
      return table.grad_rho === null ? null : -table.grad_rho;
    default:
      return null;
  }
}
