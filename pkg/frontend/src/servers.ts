// Client-side server registry (the UI keeps its own list; servers do not
// federate). Persisted in localStorage.

export interface ServerEntry {
  label: string;
  baseUrl: string;
  lastSeen: { version: string; at: number } | null;
}

const STORAGE_KEY = "qndk.servers";

export function loadServers(storage: Storage = localStorage): ServerEntry[] {
  try {
    const raw = storage.getItem(STORAGE_KEY);
    if (!raw) return [];
    const parsed = JSON.parse(raw) as ServerEntry[];
    return Array.isArray(parsed) ? parsed : [];
  } catch {
    return [];
  }
}

export function saveServers(entries: ServerEntry[], storage: Storage = localStorage): void {
  storage.setItem(STORAGE_KEY, JSON.stringify(entries));
}

export function addServer(
  entries: ServerEntry[],
  label: string,
  baseUrl: string,
): ServerEntry[] {
  const normalized = baseUrl.replace(/\/$/, "");
  if (entries.some((e) => e.baseUrl === normalized)) return entries;
  return [...entries, { label: label || normalized, baseUrl: normalized, lastSeen: null }];
}

export function removeServer(entries: ServerEntry[], baseUrl: string): ServerEntry[] {
  return entries.filter((e) => e.baseUrl !== baseUrl);
}

export function markSeen(
  entries: ServerEntry[],
  baseUrl: string,
  version: string,
  at: number = Date.now(),
): ServerEntry[] {
  return entries.map((e) => (e.baseUrl === baseUrl ? { ...e, lastSeen: { version, at } } : e));
}
