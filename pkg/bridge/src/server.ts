/**
 * Line-oriented protocol servers: stdio for spawned operation and a small
 * TCP listener for remote operation. Both speak the same handshake-then-
 * request loop and answer every line, valid or not, so the engine never
 * blocks waiting for a response that is not coming.
 */

import * as net from "node:net";
import * as readline from "node:readline";
import { Readable, Writable } from "node:stream";

import {
  BridgeMode,
  decodeRequest,
  encodeError,
  encodeHello,
  encodeRecords,
} from "./protocol";
import { StubSettings, synthesizeRecords } from "./stub";

export interface ServerOptions {
  mode: BridgeMode;
  settings: StubSettings;
  log: (message: string) => void;
}

/** Answer one raw line from the engine with exactly one response line. */
export function handleLine(line: string, options: ServerOptions): string {
  const decoded = decodeRequest(line);
  if (!decoded.ok) {
    options.log(`rejected line: ${decoded.error}`);
    return encodeError(decoded.id, decoded.error);
  }
  const request = decoded.request;
  try {
    const records = synthesizeRecords(request, options.settings);
    return encodeRecords(request.id, records);
  } catch (exc) {
    options.log(`evaluation failed: ${(exc as Error).message}`);
    return encodeError(request.id, `evaluation failed: ${(exc as Error).message}`);
  }
}

function serveStream(input: Readable, output: Writable, options: ServerOptions): Promise<number> {
  output.write(encodeHello(options.mode) + "\n");
  let served = 0;
  const lines = readline.createInterface({ input, crlfDelay: Infinity });
  return new Promise((resolve) => {
    lines.on("line", (line) => {
      if (line.trim() === "") {
        return; // blank keep-alive lines are ignored, not errors
      }
      served += 1;
      output.write(handleLine(line, options) + "\n");
    });
    lines.on("close", () => resolve(served));
  });
}

/** Serve stdin/stdout until the engine closes our stdin. */
export async function serveStdio(options: ServerOptions): Promise<void> {
  options.log(`stub backend ready on stdio (seed ${options.settings.configSeed})`);
  const served = await serveStream(process.stdin, process.stdout, options);
  options.log(`shutting down after ${served} request(s)`);
}

/**
 * Serve TCP connections until closed. Each connection gets its own
 * handshake and loop; port 0 picks a free port, reported via the log line
 * "listening on HOST:PORT".
 */
export function serveTcp(host: string, port: number, options: ServerOptions): Promise<net.Server> {
  const server = net.createServer((socket) => {
    const remote = `${socket.remoteAddress}:${socket.remotePort}`;
    options.log(`connection from ${remote}`);
    socket.on("error", (exc) => options.log(`connection ${remote} dropped: ${exc.message}`));
    void serveStream(socket, socket, options).then((served) => {
      options.log(`connection ${remote} closed after ${served} request(s)`);
      socket.end();
    });
  });
  return new Promise((resolve, reject) => {
    server.once("error", reject);
    server.listen(port, host, () => {
      const address = server.address() as net.AddressInfo;
      options.log(`listening on ${address.address}:${address.port}`);
      resolve(server);
    });
  });
}
