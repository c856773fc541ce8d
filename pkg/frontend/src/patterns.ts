/**
 * Heuristic layout-pattern labels for a point's ghost cloud.
 *
 * Single-linkage clustering over the original projection plus its ghosts,
 * merging strictly below the threshold d, then a coarse read of the cluster
 * structure:
 *
 *   P1  everything in one cluster (stable)
 *   P2  a few clusters (the point wavers between a couple of places)
 *   P3  at least half the projections are mutually far apart (scattered)
 *   P4  exactly two clusters with the original alone in its own
 */

export type Pattern = "P1" | "P2" | "P3" | "P4";

type Point = readonly [number, number];

class UnionFind {
  private parent: number[];

  constructor(n: number) {
    this.parent = Array.from({ length: n }, (_, i) => i);
  }

  find(i: number): number {
    while (this.parent[i] !== i) {
      this.parent[i] = this.parent[this.parent[i]];
      i = this.parent[i];
    }
    return i;
  }

  union(i: number, j: number): void {
    this.parent[this.find(i)] = this.find(j);
  }
}

/** Cluster count and the size of the cluster containing point 0. */
export function singleLinkage(points: readonly Point[], d: number):
    { clusters: number; firstClusterSize: number } {
  const n = points.length;
  const uf = new UnionFind(n);
  for (let i = 0; i < n; i++) {
    for (let j = i + 1; j < n; j++) {
      const dx = points[i][0] - points[j][0];
      const dy = points[i][1] - points[j][1];
      if (Math.sqrt(dx * dx + dy * dy) < d) {
        uf.union(i, j);
      }
    }
  }
  const roots = new Set<number>();
  let firstClusterSize = 0;
  const rootOfFirst = uf.find(0);
  for (let i = 0; i < n; i++) {
    roots.add(uf.find(i));
    if (uf.find(i) === rootOfFirst) {
      firstClusterSize++;
    }
  }
  return { clusters: roots.size, firstClusterSize };
}

export function classifyPattern(original: Point,
                                ghosts: readonly Point[],
                                d: number): Pattern {
  const points = [original, ...ghosts];
  const { clusters, firstClusterSize } = singleLinkage(points, d);
  if (clusters === 1) {
    return "P1";
  }
  if (clusters === 2 && firstClusterSize === 1) {
    return "P4";
  }
  if (clusters >= Math.ceil(points.length / 2)) {
    return "P3";
  }
  return "P2";
}
