/** Transcript-driven video seeking. */

import type { ApiSentence } from "./types.js";

/** Clicking a sentence seeks the player to exactly its start time. */
export function seekOffset(sentence: ApiSentence): number {
  return sentence.start_time;
}

/**
 * Index of the sentence the playhead is currently inside, for follow-along
 * highlighting; -1 before the first sentence starts.
 */
export function currentSentenceIndex(sentences: ApiSentence[], position: number): number {
  let current = -1;
  for (const sentence of sentences) {
    if (sentence.start_time <= position) {
      current = sentence.index;
    } else {
      break;
    }
  }
  return current;
}
