import { mkdtemp, rm, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import {
  DataError,
  EngineError,
  UsageError,
  canonicalSort,
  mineDbmart,
  planChunks,
  querySequences,
  readSequencesCsv,
  runEngine,
  sequenceCount,
  sequencesEqual,
  sparsityScreen,
  translate,
  type MineResult,
} from "../src/index.js";

const PHENX_LIMIT = 10_000_000n; // seq = start * 10^7 + end

// Three differently shaped synthetic event tables: broad/typical, dense
// (few codes, short span, many same-date collisions), and long histories.
const FIXTURES = [
  {
    name: "broad",
    args: ["--patients", "30", "--avg-entries", "8", "--distinct-phenx", "40", "--seed", "1"],
  },
  {
    name: "dense",
    args: [
      "--patients", "50", "--avg-entries", "5", "--distinct-phenx", "15",
      "--date-span-days", "120", "--seed", "2",
    ],
  },
  {
    name: "long",
    args: [
      "--patients", "12", "--avg-entries", "25", "--distinct-phenx", "200",
      "--date-span-days", "1460", "--seed", "3",
    ],
  },
];

let dir: string;
const fixturePaths: string[] = [];
let mined0: MineResult; // fixture 0 mined once through the binding

beforeAll(async () => {
  dir = await mkdtemp(join(tmpdir(), "tseq-engine-"));
  for (const fixture of FIXTURES) {
    const path = join(dir, `${fixture.name}.csv`);
    await runEngine(["synth", ...fixture.args, "--output", path]);
    fixturePaths.push(path);
  }
  mined0 = await mineDbmart(fixturePaths[0]);
});

afterAll(async () => {
  await rm(dir, { recursive: true, force: true });
});

async function cliMineToCsv(fixture: number, name: string): Promise<string> {
  const out = join(dir, `${name}.csv`);
  await runEngine([
    "mine", "--input", fixturePaths[fixture], "--mode", "memory", "--output", out,
  ]);
  return out;
}

describe("binding equivalence with the CLI", () => {
  for (let i = 0; i < FIXTURES.length; i++) {
    it(`mine and screen agree on the ${FIXTURES[i].name} fixture`, async () => {
      const { sequences } =
        i === 0 ? mined0 : await mineDbmart(fixturePaths[i]);
      const cliCsv = await cliMineToCsv(i, `${FIXTURES[i].name}-mined`);
      const cliMined = canonicalSort(await readSequencesCsv(cliCsv));
      expect(sequenceCount(sequences)).toBeGreaterThan(0);
      expect(sequencesEqual(canonicalSort(sequences), cliMined)).toBe(true);

      const kept = await sparsityScreen(sequences, { threshold: 2 });
      const cliKeptCsv = join(dir, `${FIXTURES[i].name}-kept.csv`);
      await runEngine([
        "screen", "--input", cliCsv, "--output", cliKeptCsv,
        "--sparsity-threshold", "2",
      ]);
      const cliKept = canonicalSort(await readSequencesCsv(cliKeptCsv));
      expect(kept.patient.length).toBeLessThan(sequences.patient.length);
      expect(sequencesEqual(canonicalSort(kept), cliKept)).toBe(true);
    });
  }

  it("agrees in the other screening modes as well", async () => {
    const cliCsv = await cliMineToCsv(1, "dense-mined-modes");
    const { sequences } = await mineDbmart(fixturePaths[1]);

    const byPatients = await sparsityScreen(sequences, {
      threshold: 3,
      mode: "distinct_patients",
    });
    const cliByPatientsCsv = join(dir, "dense-kept-patients.csv");
    await runEngine([
      "screen", "--input", cliCsv, "--output", cliByPatientsCsv,
      "--sparsity-threshold", "3", "--sparsity-mode", "distinct_patients",
    ]);
    expect(
      sequencesEqual(
        canonicalSort(byPatients),
        canonicalSort(await readSequencesCsv(cliByPatientsCsv)),
      ),
    ).toBe(true);

    const byBuckets = await sparsityScreen(sequences, {
      threshold: 2,
      durationAware: true,
      bucketUnit: "weeks",
      bucketBits: 6,
    });
    const cliByBucketsCsv = join(dir, "dense-kept-buckets.csv");
    await runEngine([
      "screen", "--input", cliCsv, "--output", cliByBucketsCsv,
      "--sparsity-threshold", "2", "--duration-sparsity",
      "--bucket-unit", "weeks", "--bucket-bits", "6",
    ]);
    expect(
      sequencesEqual(
        canonicalSort(byBuckets),
        canonicalSort(await readSequencesCsv(cliByBucketsCsv)),
      ),
    ).toBe(true);
  });

  it("worker count does not change the mined result", async () => {
    const single = await mineDbmart(fixturePaths[0], { threads: 1 });
    const double = await mineDbmart(fixturePaths[0], { threads: 2 });
    expect(sequencesEqual(single.sequences, double.sequences)).toBe(true);
    expect(sequencesEqual(single.sequences, mined0.sequences)).toBe(true);
  });
});

describe("degenerate inputs", () => {
  it("an empty table mines to empty arrays", async () => {
    const { sequences, lookups } = await mineDbmart([]);
    expect(sequenceCount(sequences)).toBe(0);
    expect(lookups.idToPhenx).toEqual([]);
    expect(lookups.idToPatient).toEqual([]);
  });

  it("a single-entry patient mines to no sequences but keeps its labels", async () => {
    const { sequences, lookups } = await mineDbmart([
      { patient: "p1", date: "2021-06-01", phenx: "I10" },
    ]);
    expect(sequenceCount(sequences)).toBe(0);
    expect(lookups.idToPhenx).toEqual(["I10"]);
    expect(lookups.idToPatient).toEqual(["p1"]);
  });

  it("threshold-1 screening is the identity", async () => {
    const kept = await sparsityScreen(mined0.sequences, { threshold: 1 });
    expect(sequencesEqual(kept, mined0.sequences)).toBe(true);
  });
});

describe("query, translate, and plan wrappers", () => {
  it("query filters match a local recount of the columnar data", async () => {
    const { sequences, lookups } = mined0;
    const label = lookups.idToPhenx[0];
    const id = BigInt(lookups.phenxToId.get(label)!);
    const rows = await querySequences(sequences, lookups, {
      startsWith: label,
      minDurationDays: 30,
    });
    let expected = 0;
    for (let i = 0; i < sequences.seq.length; i++) {
      if (sequences.seq[i] / PHENX_LIMIT === id && sequences.duration[i] >= 30) {
        expected += 1;
      }
    }
    expect(rows.length).toBe(expected);
    expect(rows.length).toBeGreaterThan(0);
    for (const row of rows) {
      expect(row.startPhenx).toBe(label);
      expect(row.durationDays).toBeGreaterThanOrEqual(30);
    }
  });

  it("translate labels every record consistently with the lookups", async () => {
    const { sequences, lookups } = mined0;
    const rows = await translate(sequences, lookups);
    expect(rows.length).toBe(sequenceCount(sequences));
    for (const i of [0, 1, rows.length - 1]) {
      const row = rows[i];
      expect(row.patient).toBe(lookups.idToPatient[sequences.patient[i]]);
      expect(row.startPhenx).toBe(
        lookups.idToPhenx[Number(sequences.seq[i] / PHENX_LIMIT)],
      );
      expect(row.endPhenx).toBe(
        lookups.idToPhenx[Number(sequences.seq[i] % PHENX_LIMIT)],
      );
      expect(row.durationDays).toBe(sequences.duration[i]);
    }
  });

  it("plan chunks partition the table under the cap", async () => {
    const { sequences } = mined0;
    const total = sequenceCount(sequences);
    const perPatient = new Map<number, number>();
    for (const patient of sequences.patient) {
      perPatient.set(patient, (perPatient.get(patient) ?? 0) + 1);
    }
    const worst = Math.max(...perPatient.values());
    const limit = Math.max(worst, Math.ceil(total / 3));
    const plan = await planChunks(fixturePaths[0], limit);
    expect(plan.length).toBeGreaterThan(1);
    expect(plan.reduce((sum, row) => sum + row.predictedSequences, 0)).toBe(
      total,
    );
    for (const row of plan) {
      expect(row.predictedSequences).toBeLessThanOrEqual(limit);
      expect(row.patients).toBe(row.lastPatient - row.firstPatient + 1);
    }
    for (let i = 1; i < plan.length; i++) {
      expect(plan[i].firstPatient).toBe(plan[i - 1].lastPatient + 1);
    }
  });
});

describe("typed errors", () => {
  it("maps a bad flag to UsageError (exit 1)", async () => {
    await expect(
      runEngine(["mine", "--definitely-not-a-flag"]),
    ).rejects.toBeInstanceOf(UsageError);
  });

  it("maps forwarded validation failures to UsageError", async () => {
    await expect(
      sparsityScreen(mined0.sequences, { threshold: 0 }),
    ).rejects.toBeInstanceOf(UsageError);
  });

  it("maps malformed input data to DataError (exit 2)", async () => {
    const bad = join(dir, "bad.csv");
    await writeFile(bad, "a,b\n1,2\n");
    const failure = await mineDbmart(bad).then(
      () => null,
      (err) => err,
    );
    expect(failure).toBeInstanceOf(DataError);
    expect(String(failure)).toMatch(/patient_num/);
    expect(failure.exitCode).toBe(2);
  });

  it("reports a missing engine binary as EngineError", async () => {
    await expect(
      runEngine(["--help"], { bin: ["definitely-not-tseq-9z"] }),
    ).rejects.toBeInstanceOf(EngineError);
  });
});
