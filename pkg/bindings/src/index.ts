/**
 * Node bindings for the gindex scoring toolkit.
 *
 * Every numeric result is computed by the `gindex` CLI (resolved from
 * configuration, `$GINDEX_CLI`, or the PATH) and parsed from its JSON output,
 * so scores are identical to what the command line reports. Calls spawn
 * independent processes and share no mutable state, which makes them safe to
 * overlap inside a training loop.
 */

import { join } from "node:path";
import { readJson, resolveCommand, runCli, withTempFiles } from "./runner.js";

export interface ErrorBreakdown {
  syntax: number;
  function: number;
  dataflow: number;
}

export interface ScoreResult {
  delta: number;
  theta: number;
  exact: boolean;
  /** Triples [referenceVertex, generatedVertex, similarity]. */
  mapping: [number, number, number][];
  errors: ErrorBreakdown;
}

export interface DomainDistance {
  domain_id: string;
  omega: number;
  gd: number;
}

export interface OmegaResult {
  overall: number;
  domains: DomainDistance[];
}

export interface DomainTerms {
  domain_id: string;
  omega: number;
  gd: number;
  weight: number;
  experience: number;
}

export interface TaskScore {
  task_id: string;
  theta: number;
  omega: number;
  tc: number;
  syntax_errors: number;
  exact: boolean;
  domains: DomainTerms[];
}

export interface GIndexReport {
  system: string;
  rho: number;
  g_index: number;
  mean_theta: number;
  mean_omega: number;
  skill_level: number;
  level_tag: string;
  task_count: number;
  per_task: TaskScore[];
}

export interface ScorerConfig {
  /** CLI command; a string is split on spaces (e.g. "python3 -m gindex.cli"). */
  cliPath?: string | string[];
  /** Priors override applied to g-index evaluations. */
  rho?: number;
  /** Search-node cap for the clique solver. */
  cliqueBudget?: number;
  /** Domain-clustering threshold (reserved for clustering endpoints). */
  threshold?: number;
}

export class BoundScorer {
  readonly command: string[];
  readonly rho: number | null;
  readonly cliqueBudget: number | null;
  readonly threshold: number | null;

  constructor(config: ScorerConfig = {}) {
    this.command = resolveCommand(config.cliPath);
    this.rho = config.rho ?? null;
    this.cliqueBudget = config.cliqueBudget ?? null;
    this.threshold = config.threshold ?? null;
    Object.freeze(this.command);
    Object.freeze(this);
  }

  private budgetFlags(): string[] {
    return this.cliqueBudget === null ? [] : ["--clique-budget", String(this.cliqueBudget)];
  }

  /**
   * Divergence report for a generated program against a reference.
   * A generated document that fails to parse scores delta 1 with a syntax
   * error counted (the CLI reports it with a degenerate-but-scored status).
   */
  async score(referenceText: string, generatedText: string): Promise<ScoreResult> {
    return withTempFiles(
      { "reference.json": referenceText, "generated.json": generatedText },
      async (_dir, paths) => {
        const result = await runCli(this.command, [
          "score",
          paths["reference.json"],
          paths["generated.json"],
          "--format",
          "json",
          ...this.budgetFlags(),
        ]);
        if (result.code !== 0 && result.code !== 2) {
          throw new Error(result.stderr.trim() || `score failed with code ${result.code}`);
        }
        return JSON.parse(result.stdout) as ScoreResult;
      },
    );
  }

  /** Performance reading of a score: 1 - delta, as reported by the CLI. */
  async performance(referenceText: string, generatedText: string): Promise<number> {
    return (await this.score(referenceText, generatedText)).theta;
  }

  /** Domain distance of a task program against every curriculum domain. */
  async omega(taskProgramText: string, curriculumText: string): Promise<OmegaResult> {
    return withTempFiles(
      { "task.json": taskProgramText, "curriculum.json": curriculumText },
      async (_dir, paths) => {
        const result = await runCli(this.command, [
          "omega",
          "--task",
          paths["task.json"],
          "--curriculum",
          paths["curriculum.json"],
          "--format",
          "json",
          ...this.budgetFlags(),
        ]);
        if (result.code !== 0) {
          throw new Error(result.stderr.trim() || `omega failed with code ${result.code}`);
        }
        return JSON.parse(result.stdout) as OmegaResult;
      },
    );
  }

  /** Generalization difficulty of a domain distance: exp(10 x). */
  gd(omegaValue: number): number {
    if (!(omegaValue >= 0 && omegaValue <= 1)) {
      throw new RangeError(`domain distance must lie in [0, 1], got ${omegaValue}`);
    }
    return Math.exp(10 * omegaValue);
  }

  /** Score a full evaluation manifest and return the structured report. */
  async gIndex(manifestText: string): Promise<GIndexReport> {
    return withTempFiles({ "manifest.json": manifestText }, async (dir, paths) => {
      const outDir = join(dir, "report");
      const args = ["gindex", paths["manifest.json"], "--out", outDir, ...this.budgetFlags()];
      if (this.rho !== null) args.push("--rho", String(this.rho));
      const result = await runCli(this.command, args);
      if (result.code !== 0) {
        throw new Error(result.stderr.trim() || `gindex failed with code ${result.code}`);
      }
      return (await readJson(join(outDir, "report.json"))) as GIndexReport;
    });
  }
}

const defaultScorer = new BoundScorer();

export function score(referenceText: string, generatedText: string): Promise<ScoreResult> {
  return defaultScorer.score(referenceText, generatedText);
}

export function performance(referenceText: string, generatedText: string): Promise<number> {
  return defaultScorer.performance(referenceText, generatedText);
}

export function omega(taskProgramText: string, curriculumText: string): Promise<OmegaResult> {
  return defaultScorer.omega(taskProgramText, curriculumText);
}

export function gd(omegaValue: number): number {
  return defaultScorer.gd(omegaValue);
}

export function gIndex(manifestText: string): Promise<GIndexReport> {
  return defaultScorer.gIndex(manifestText);
}
