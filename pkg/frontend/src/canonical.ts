// Canonical JSON, byte-compatible with the server's form: sorted keys,
// compact separators, integral numbers as plain integers, everything else
// in lowercase scientific notation with no trailing zeros, trailing LF.
// Matching bytes matter: document hashes and share/export round-trips key
// off this exact encoding.

const INT_EXACT_LIMIT = 2 ** 53;

export function canonicalNumber(x: number): string {
  if (!Number.isFinite(x)) {
    throw new Error(`${x} is not representable in JSON`);
  }
  if (x === 0) {
    return "0";
  }
  if (Number.isInteger(x) && Math.abs(x) <= INT_EXACT_LIMIT) {
    return x.toString();
  }
  // Shortest round-trip decimal, re-expressed as d[.ddd]e<exp>.
  const text = x.toString();
  const match = /^(-?)(\d+)(?:\.(\d+))?(?:e([+-]\d+))?$/.exec(text);
  if (!match) {
    throw new Error(`unexpected number form ${text}`);
  }
  const [, sign, intPart, fracPart = "", expPart] = match;
  let digits = intPart + fracPart;
  let exponent = (expPart ? parseInt(expPart, 10) : 0) - fracPart.length;
  let start = 0;
  while (start < digits.length - 1 && digits[start] === "0") {
    start += 1;
  }
  digits = digits.slice(start);
  let end = digits.length;
  while (end > 1 && digits[end - 1] === "0") {
    end -= 1;
    exponent += 1;
  }
  digits = digits.slice(0, end);
  const sciExponent = exponent + digits.length - 1;
  const mantissa = digits.length > 1 ? `${digits[0]}.${digits.slice(1)}` : digits;
  return `${sign}${mantissa}e${sciExponent}`;
}

function write(value: unknown, out: string[]): void {
  if (value === null) {
    out.push("null");
  } else if (value === true) {
    out.push("true");
  } else if (value === false) {
    out.push("false");
  } else if (typeof value === "string") {
    out.push(JSON.stringify(value));
  } else if (typeof value === "number") {
    out.push(canonicalNumber(value));
  } else if (Array.isArray(value)) {
    out.push("[");
    value.forEach((item, i) => {
      if (i) out.push(",");
      write(item, out);
    });
    out.push("]");
  } else if (typeof value === "object") {
    const obj = value as Record<string, unknown>;
    out.push("{");
    Object.keys(obj)
      .sort()
      .forEach((key, i) => {
        if (i) out.push(",");
        out.push(JSON.stringify(key));
        out.push(":");
        write(obj[key], out);
      });
    out.push("}");
  } else {
    throw new Error(`${typeof value} is not JSON-serializable`);
  }
}

export function canonicalText(value: unknown): string {
  const out: string[] = [];
  write(value, out);
  out.push("\n");
  return out.join("");
}

export function canonicalBytes(value: unknown): Uint8Array {
  return new TextEncoder().encode(canonicalText(value));
}
