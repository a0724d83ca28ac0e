import { execFile } from "node:child_process";
import { mkdtemp, rm, writeFile, readFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface CliResult {
  code: number;
  stdout: string;
  stderr: string;
}

/** Resolve the scoring CLI command: config wins, then $GINDEX_CLI, then PATH. */
export function resolveCommand(cliPath?: string | string[]): string[] {
  if (Array.isArray(cliPath)) return cliPath;
  if (cliPath) return cliPath.split(" ");
  const fromEnv = process.env.GINDEX_CLI;
  if (fromEnv) return fromEnv.split(" ");
  return ["gindex"];
}

export function runCli(command: string[], args: string[]): Promise<CliResult> {
  const [executable, ...prefix] = command;
  return new Promise((resolve, reject) => {
    execFile(
      executable,
      [...prefix, ...args],
      { maxBuffer: 64 * 1024 * 1024 },
      (error, stdout, stderr) => {
        if (error && typeof error.code !== "number") {
          reject(new Error(`failed to launch '${executable}': ${error.message}`));
          return;
        }
        resolve({ code: error ? (error.code as number) : 0, stdout, stderr });
      },
    );
  });
}

/** Run a callback inside a throwaway directory populated with input files. */
export async function withTempFiles<T>(
  files: Record<string, string>,
  fn: (dir: string, paths: Record<string, string>) => Promise<T>,
): Promise<T> {
  const dir = await mkdtemp(join(tmpdir(), "gindex-bindings-"));
  try {
    const paths: Record<string, string> = {};
    for (const [name, content] of Object.entries(files)) {
      paths[name] = join(dir, name);
      await writeFile(paths[name], content, "utf8");
    }
    return await fn(dir, paths);
  } finally {
    await rm(dir, { recursive: true, force: true });
  }
}

export async function readJson(path: string): Promise<unknown> {
  return JSON.parse(await readFile(path, "utf8"));
}
