/**
 * Deterministic counter-mode randomness for the stub backend.
 *
 * Every draw is a pure function of (key parts, draw index), so identical
 * requests always synthesize identical records regardless of arrival order,
 * process lifetime, or platform. The scrambler is the standard splitmix64
 * finalizer over 64-bit integer arithmetic via BigInt.
 */

const MASK64 = (1n << 64n) - 1n;
const GOLDEN = 0x9e3779b97f4a7c15n;
const FNV_OFFSET = 0xcbf29ce484222325n;
const FNV_PRIME = 0x100000001b3n;

function splitmix64(x: bigint): bigint {
  let z = (x + GOLDEN) & MASK64;
  z = ((z ^ (z >> 30n)) * 0xbf58476d1ce4e5b9n) & MASK64;
  z = ((z ^ (z >> 27n)) * 0x94d049bb133111ebn) & MASK64;
  return (z ^ (z >> 31n)) & MASK64;
}

function fnv1a64(text: string): bigint {
  let hash = FNV_OFFSET;
  for (const byte of Buffer.from(text, "utf-8")) {
    hash = ((hash ^ BigInt(byte)) * FNV_PRIME) & MASK64;
  }
  return hash;
}

/** Fold heterogeneous key parts into one 64-bit key. */
export function hashKey(...parts: Array<number | string>): bigint {
  let key = FNV_OFFSET;
  for (const part of parts) {
    const piece = typeof part === "string" ? fnv1a64(part) : BigInt(Math.trunc(part)) & MASK64;
    key = splitmix64(key ^ piece);
  }
  return key;
}

export class CounterRng {
  private readonly key: bigint;
  private counter = 0n;

  constructor(...parts: Array<number | string>) {
    this.key = hashKey(...parts);
  }

  /** Uniform double in [0, 1) from the top 53 bits of the next word. */
  next(): number {
    this.counter += 1n;
    const word = splitmix64((this.key ^ (this.counter * GOLDEN)) & MASK64);
    return Number(word >> 11n) / 2 ** 53;
  }

  /** Uniform integer in [0, bound). */
  nextInt(bound: number): number {
    if (!Number.isInteger(bound) || bound <= 0) {
      throw new RangeError(`bound must be a positive integer, got ${bound}`);
    }
    return Math.floor(this.next() * bound);
  }
}
