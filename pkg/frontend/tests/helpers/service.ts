/** Spawn the HTTP service for tests and wait until it answers /health. */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface RunningService {
  baseUrl: string;
  dataDir: string;
  stop(): Promise<void>;
}

const PYTHON = process.env.PYTHON ?? "python3";

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function healthy(baseUrl: string): Promise<boolean> {
  try {
    const response = await fetch(`${baseUrl}/health`);
    return response.ok;
  } catch {
    return false;
  }
}

async function tryPort(port: number, dataDir: string): Promise<RunningService | null> {
  const child: ChildProcess = spawn(
    PYTHON,
    [
      "-m",
      "uvicorn",
      "--factory",
      "verba.service.app:create_app",
      "--host",
      "127.0.0.1",
      "--port",
      String(port),
      "--log-level",
      "warning",
    ],
    {
      env: { ...process.env, VERBA_DATA_DIR: dataDir },
      stdio: ["ignore", "inherit", "inherit"],
    },
  );
  let exited = false;
  child.on("exit", () => {
    exited = true;
  });
  const baseUrl = `http://127.0.0.1:${port}`;
  for (let attempt = 0; attempt < 200; attempt++) {
    if (exited) {
      return null;
    }
    if (await healthy(baseUrl)) {
      return {
        baseUrl,
        dataDir,
        stop: async () => {
          child.kill("SIGTERM");
          for (let i = 0; i < 50 && !exited; i++) {
            await sleep(100);
          }
          if (!exited) {
            child.kill("SIGKILL");
          }
        },
      };
    }
    await sleep(150);
  }
  child.kill("SIGKILL");
  return null;
}

/** Start the service on the first free port at or above basePort. */
export async function startService(basePort: number): Promise<RunningService> {
  const dataDir = mkdtempSync(join(tmpdir(), "verba-ui-"));
  for (let port = basePort; port < basePort + 20; port++) {
    const service = await tryPort(port, dataDir);
    if (service !== null) {
      return service;
    }
  }
  throw new Error(`could not start the service near port ${basePort}`);
}
