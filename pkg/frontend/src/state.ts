/**
 * View state for a loaded export: threshold, selection, visibility.
 *
 * Everything here is a pure function of the export and the UI knobs; the
 * embedding is never recomputed. The export object itself is treated as
 * immutable.
 */

import { GhostEntry, GhostExport } from "./types.js";
import { classifyPattern, Pattern } from "./patterns.js";

export type ColorMode = "labels" | "none";

export interface UnstableItem {
  id: number;
  d_i: number;
}

export class ViewState {
  readonly export_: GhostExport;
  private d: number;
  private selection = new Set<number>();
  showUnstable = true;
  colorMode: ColorMode = "labels";
  ghostShade = true;

  private droppedSet: Set<number>;
  private ghostById = new Map<number, GhostEntry>();
  private listeners: Array<() => void> = [];

  constructor(exported: GhostExport) {
    this.export_ = exported;
    this.d = exported.default_d;
    this.droppedSet = new Set(
      exported.dropped.flatMap((flag, id) => (flag ? [id] : [])));
    for (const entry of exported.ghosts) {
      this.ghostById.set(entry.id, entry);
    }
  }

  get threshold(): number {
    return this.d;
  }

  setThreshold(d: number): void {
    this.d = Math.min(1, Math.max(0, d));
    this.notify();
  }

  isDropped(id: number): boolean {
    return this.droppedSet.has(id);
  }

  ghostsOf(id: number): GhostEntry | undefined {
    return this.ghostById.get(id);
  }

  /** Unstable = d_i strictly above the threshold, dropped points excluded. */
  isUnstable(id: number): boolean {
    return !this.droppedSet.has(id) && this.export_.distances[id] > this.d;
  }

  /** Ids above the threshold, sorted by d_i descending. */
  unstableList(): UnstableItem[] {
    const items: UnstableItem[] = [];
    const { distances, n_points } = this.export_;
    for (let id = 0; id < n_points; id++) {
      if (!this.droppedSet.has(id) && distances[id] > this.d) {
        items.push({ id, d_i: distances[id] });
      }
    }
    items.sort((a, b) => b.d_i - a.d_i || a.id - b.id);
    return items;
  }

  unstableCount(): number {
    return this.unstableList().length;
  }

  /** Points to draw given the visibility toggle. */
  visibleIds(): number[] {
    const ids: number[] = [];
    for (let id = 0; id < this.export_.n_points; id++) {
      if (this.showUnstable || !this.isUnstable(id)) {
        ids.push(id);
      }
    }
    return ids;
  }

  setShowUnstable(flag: boolean): void {
    this.showUnstable = flag;
    this.notify();
  }

  selected(): number[] {
    return [...this.selection].sort((a, b) => a - b);
  }

  isSelected(id: number): boolean {
    return this.selection.has(id);
  }

  toggleSelect(id: number): void {
    if (this.selection.has(id)) {
      this.selection.delete(id);
    } else {
      this.selection.add(id);
    }
    this.notify();
  }

  clearSelection(): void {
    this.selection.clear();
    this.notify();
  }

  /** Heuristic pattern badge for a point, undefined when dropped. */
  patternOf(id: number): Pattern | undefined {
    const entry = this.ghostById.get(id);
    if (entry === undefined) {
      return undefined;
    }
    return classifyPattern(this.export_.positions[id], entry.positions,
                           this.d);
  }

  labelName(id: number): string | undefined {
    const labels = this.export_.labels;
    if (labels === undefined) {
      return undefined;
    }
    const label = labels[id];
    return this.export_.label_names?.[label] ?? String(label);
  }

  subscribe(fn: () => void): void {
    this.listeners.push(fn);
  }

  private notify(): void {
    for (const fn of this.listeners) {
      fn();
    }
  }
}
