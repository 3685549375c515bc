import type { ResponseBody } from "./api.js";

/**
 * Click-order ranking for one trial: the first selected word is rank 1,
 * the second rank 2, and so on up to four. Deselecting a word shifts
 * everything after it up one rank.
 */
export class RankingState {
  static readonly MAX_RANKS = 4;

  private picks: string[] = [];

  /** Select an unselected word (up to four) or deselect a selected one. */
  toggle(word: string): void {
    const idx = this.picks.indexOf(word);
    if (idx >= 0) {
      this.picks.splice(idx, 1);
    } else if (this.picks.length < RankingState.MAX_RANKS) {
      this.picks.push(word);
    }
  }

  /** 1-based rank of a word, or null when unselected. */
  rankOf(word: string): number | null {
    const idx = this.picks.indexOf(word);
    return idx >= 0 ? idx + 1 : null;
  }

  get ranks(): readonly string[] {
    return this.picks;
  }

  /** Ranks 1 and 2 are required; 3 and 4 stay optional. */
  canSubmit(): boolean {
    return this.picks.length >= 2;
  }

  /**
   * True while "no more related words" is a meaningful choice: the two
   * required ranks are set and at least one optional slot is still open.
   */
  canStopEarly(): boolean {
    return this.picks.length >= 2 && this.picks.length < RankingState.MAX_RANKS;
  }

  reset(): void {
    this.picks = [];
  }

  toResponse(trialId: string, responderId: string): ResponseBody {
    if (!this.canSubmit()) {
      throw new Error("ranks 1 and 2 are required before submitting");
    }
    return {
      trialId,
      rank1: this.picks[0],
      rank2: this.picks[1],
      rank3: this.picks[2] ?? null,
      rank4: this.picks[3] ?? null,
      responderId,
    };
  }
}
