import type { Verdict } from "./types.js";

/** Keyboard shortcuts: T / F / N submit the matching verdict. */
export function verdictForKey(key: string): Verdict | null {
  switch (key.toLowerCase()) {
    case "t":
      return "True";
    case "f":
      return "False";
    case "n":
      return "NEI";
    default:
      return null;
  }
}
