/**
 * Entry point. Spawned by the engine (or run by hand) as:
 *
 *   node dist/main.js --mode stub [--seed N] [--idle-seconds S] [--tcp PORT]
 *
 * Exit codes: 0 clean shutdown, 2 usage error, 3 backend unavailable.
 */

import { parseArgs } from "node:util";

import { ServerOptions, serveStdio, serveTcp } from "./server";

const USAGE = `usage: node main.js [--mode stub|real] [--seed N] [--idle-seconds S] [--tcp PORT]

  --mode          backend to serve: "stub" synthesizes measurements, "real"
                  drives a GPU image model (requires one to be installed)
  --seed          stub config seed mixed into every synthesized draw (default 0)
  --idle-seconds  idle wall-clock seconds amortized into energy figures (default 0)
  --tcp           listen on 127.0.0.1:PORT instead of serving stdio; PORT 0
                  picks a free port (reported on stderr)
`;

const EXIT_USAGE = 2;
const EXIT_UNAVAILABLE = 3;

function log(message: string): void {
  process.stderr.write(`equigen-bridge: ${message}\n`);
}

function fail(message: string): never {
  process.stderr.write(`equigen-bridge: ${message}\n\n${USAGE}`);
  process.exit(EXIT_USAGE);
}

function parseNonNegative(text: string, flag: string, integer: boolean): number {
  const value = Number(text);
  if (!Number.isFinite(value) || value < 0 || (integer && !Number.isInteger(value))) {
    fail(`${flag} must be a non-negative ${integer ? "integer" : "number"}, got "${text}"`);
  }
  return value;
}

async function main(): Promise<void> {
  let parsed;
  try {
    parsed = parseArgs({
      args: process.argv.slice(2),
      options: {
        mode: { type: "string", default: "stub" },
        seed: { type: "string", default: "0" },
        "idle-seconds": { type: "string", default: "0" },
        tcp: { type: "string" },
        help: { type: "boolean", default: false },
      },
    });
  } catch (exc) {
    fail((exc as Error).message);
  }
  const values = parsed.values;
  if (values.help) {
    process.stdout.write(USAGE);
    return;
  }
  const mode = values.mode as string;
  if (mode !== "stub" && mode !== "real") {
    fail(`--mode must be "stub" or "real", got "${mode}"`);
  }
  if (mode === "real") {
    log("real mode needs a GPU image-generation backend; none is installed in this build");
    process.exit(EXIT_UNAVAILABLE);
  }

  const options: ServerOptions = {
    mode,
    settings: {
      configSeed: parseNonNegative(values.seed as string, "--seed", true),
      idleSeconds: parseNonNegative(values["idle-seconds"] as string, "--idle-seconds", false),
    },
    log,
  };

  if (values.tcp !== undefined) {
    const port = parseNonNegative(values.tcp as string, "--tcp", true);
    if (port > 65535) {
      fail(`--tcp port must be at most 65535, got ${port}`);
    }
    await serveTcp("127.0.0.1", port, options);
    return; // keeps serving until the process is killed
  }
  await serveStdio(options);
}

main().catch((exc) => {
  log(`fatal: ${(exc as Error).message}`);
  process.exit(1);
});
