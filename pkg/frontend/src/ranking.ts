/** Ranking-order helpers.
 *
 * The ranking screen only ever reorders a list that starts as the full
 * index set, so a complete permutation holds by construction; the
 * submit path still validates before any request leaves the app.
 */

export function initialOrder(count: number): number[] {
  return Array.from({ length: count }, (_, i) => i);
}

/** Move the item at `from` to position `to`, clamped to the list. */
export function moveItem(order: number[], from: number, to: number): number[] {
  const next = order.slice();
  if (from < 0 || from >= next.length) return next;
  const clamped = Math.max(0, Math.min(next.length - 1, to));
  const [item] = next.splice(from, 1);
  next.splice(clamped, 0, item as number);
  return next;
}

export function isPermutation(order: number[], count: number): boolean {
  if (order.length !== count) return false;
  const seen = new Set(order);
  if (seen.size !== count) return false;
  for (const i of order) {
    if (!Number.isInteger(i) || i < 0 || i >= count) return false;
  }
  return true;
}
