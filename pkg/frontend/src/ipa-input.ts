/** Pre-submission validation of typed IPA against the inventory symbols.
 *
 * Mirrors the server's greedy longest-match tokenizer so anything flagged
 * here would also be rejected on submit, and vice versa.
 */

export type IpaCheck =
  | { ok: true }
  | { ok: false; position: number; symbol: string };

export function checkIpa(text: string, symbols: readonly string[]): IpaCheck {
  const normalized = text.normalize("NFC");
  const registered = new Set(symbols);
  let maxLen = 0;
  for (const s of symbols) maxLen = Math.max(maxLen, s.length);

  let i = 0;
  outer: while (i < normalized.length) {
    for (let len = Math.min(maxLen, normalized.length - i); len >= 1; len--) {
      if (registered.has(normalized.slice(i, i + len))) {
        i += len;
        continue outer;
      }
    }
    return { ok: false, position: i, symbol: normalized[i]! };
  }
  return { ok: true };
}
