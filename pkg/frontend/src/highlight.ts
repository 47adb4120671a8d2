/** Map an audio playhead to the word being spoken. */

export interface WordWindow {
  start_ms: number;
  end_ms: number;
}

/**
 * Index of the word whose half-open window [start_ms, end_ms) contains the
 * playhead, or null when the playhead sits in a gap, before the first word
 * or after the last. A playhead exactly on a word's start_ms highlights
 * that word.
 *
 * Words must be ordered with non-overlapping windows. Binary search keeps
 * this cheap on every timeupdate tick.
 */
export function highlightFor(
  playheadMs: number,
  words: readonly WordWindow[],
): number | null {
  let lo = 0;
  let hi = words.length - 1;
  let lastStarted = -1;
  while (lo <= hi) {
    const mid = (lo + hi) >> 1;
    if (words[mid]!.start_ms <= playheadMs) {
      lastStarted = mid;
      lo = mid + 1;
    } else {
      hi = mid - 1;
    }
  }
  if (lastStarted >= 0 && playheadMs < words[lastStarted]!.end_ms) {
    return lastStarted;
  }
  return null;
}
