/** Shapes of the annotation service API. The client never sees (and never
 * requests) the original claim text or the gold label of an item. */

export type Verdict = "True" | "False" | "NEI";

export interface ItemView {
  item_id: number | null;
  text?: string;
  evidence?: string[];
}

export interface TechniqueProgress {
  done: number;
  total: number;
}

export interface Progress {
  total: number;
  done: number;
  pending: number;
  frozen: boolean;
  per_technique: Record<string, TechniqueProgress>;
}

export interface VerdictAck {
  item_id: number;
  status: string;
}
