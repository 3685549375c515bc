import type { Report } from "./api.js";

export interface ReportRow {
  label: string;
  precisionAt2: string;
  recallAt4: string;
  n: number;
}

/** One row per configuration, ordered by configuration name. */
export function reportRows(report: Report): ReportRow[] {
  return Object.keys(report.per_config)
    .sort()
    .map((label) => {
      const m = report.per_config[label];
      return {
        label,
        precisionAt2: formatMetric(m.precision_at_2),
        recallAt4: formatMetric(m.recall_at_4),
        n: m.n,
      };
    });
}

export function formatMetric(value: number): string {
  return value.toFixed(2);
}

export function isEmpty(report: Report): boolean {
  return Object.keys(report.per_config).length === 0;
}
