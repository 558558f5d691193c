import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { inject } from "vitest";

import { DesignApi, PrescriptionDoc } from "../src/api.js";
import { StudioSession } from "../src/store.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

export function api(): DesignApi {
  return new DesignApi(inject("serviceUrl"));
}

export function fixture(name: string): PrescriptionDoc {
  return JSON.parse(readFileSync(join(FIXTURES, `${name}.json`), "utf8")) as PrescriptionDoc;
}

export async function solvedSession(fixtureName: string): Promise<StudioSession> {
  const session = await StudioSession.open(api());
  const solved = await session.loadPrescription(fixture(fixtureName));
  if (!solved) throw new Error(`fixture ${fixtureName} should be admissible`);
  return session;
}
