import { AnnotationApi, ApiError } from "./api.js";
import type { ItemView, Progress, Verdict } from "./types.js";

/**
 * One annotator's pass over the queue.
 *
 * Exactly one item is current at a time; a verdict must be acknowledged
 * by the service before the next item loads, so nothing is ever lost
 * silently. Failed submits stay pending and are retried with backoff
 * while the UI shows a blocking banner.
 */

export type SessionPhase = "loading" | "annotating" | "submitting" | "retrying" | "done" | "error";

export interface SessionState {
  phase: SessionPhase;
  item: ItemView | null;
  progress: Progress | null;
  banner: string | null;
  submitted: number;
}

export interface SessionOptions {
  annotator?: string;
  maxRetries?: number;
  retryDelayMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export class AnnotationSession {
  private state: SessionState = {
    phase: "loading",
    item: null,
    progress: null,
    banner: null,
    submitted: 0,
  };
  private listeners: Array<(state: SessionState) => void> = [];
  private readonly annotator: string;
  private readonly maxRetries: number;
  private readonly retryDelayMs: number;
  private readonly sleep: (ms: number) => Promise<void>;

  constructor(
    private readonly api: AnnotationApi,
    options: SessionOptions = {},
  ) {
    this.annotator = options.annotator ?? "default";
    this.maxRetries = options.maxRetries ?? 3;
    this.retryDelayMs = options.retryDelayMs ?? 800;
    this.sleep = options.sleep ?? defaultSleep;
  }

  subscribe(listener: (state: SessionState) => void): void {
    this.listeners.push(listener);
    listener(this.state);
  }

  snapshot(): SessionState {
    return { ...this.state };
  }

  private update(patch: Partial<SessionState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  /** Load the next pending item (or the completion screen). */
  async start(): Promise<void> {
    this.update({ phase: "loading", banner: null });
    try {
      const item = await this.api.nextItem(this.annotator);
      if (item.item_id === null) {
        const progress = await this.api.progress();
        this.update({ phase: "done", item: null, progress });
        return;
      }
      const progress = await this.api.progress();
      this.update({ phase: "annotating", item, progress });
    } catch (err) {
      this.update({ phase: "error", banner: this.describe(err) });
    }
  }

  /**
   * Submit a verdict for the current item. Resolves once the service has
   * acknowledged it and the next item (or completion screen) is loaded.
   */
  async submit(verdict: Verdict): Promise<void> {
    const item = this.state.item;
    if (this.state.phase !== "annotating" || item === null || item.item_id === null) {
      return;
    }
    this.update({ phase: "submitting", banner: null });
    for (let attempt = 0; ; attempt += 1) {
      try {
        await this.api.submitVerdict(item.item_id, verdict, this.annotator);
        break;
      } catch (err) {
        if (err instanceof ApiError && err.status === 409) {
          break; // already recorded server-side; advancing is safe
        }
        if (attempt >= this.maxRetries) {
          this.update({ phase: "error", banner: this.describe(err) });
          return;
        }
        this.update({
          phase: "retrying",
          banner: `submit failed, retrying (${attempt + 1}/${this.maxRetries})`,
        });
        await this.sleep(this.retryDelayMs * 2 ** attempt);
      }
    }
    this.update({ submitted: this.state.submitted + 1 });
    await this.start();
  }

  private describe(err: unknown): string {
    return err instanceof Error ? err.message : String(err);
  }
}
