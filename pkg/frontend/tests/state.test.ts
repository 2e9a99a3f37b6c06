// Event-log mirroring: dedupe keys, reconnect resume, stable sort, and
// exact whitespace reconstruction for the document panes.

import { describe, expect, test } from "vitest"

import { tokenLayout, ViewState } from "../src/state.js"
import type { StreamEvent } from "../src/types.js"

function generation(seq: number, gen: number, score: number): StreamEvent {
    return {
        type: "generation",
        seq,
        score,
        description: `generation ${gen}`,
        wmd: 0.05 * seq,
        swap_count: gen,
        timestamp: `2026-08-15T10:00:${String(seq).padStart(2, "0")}`,
        text: `doc after ${seq}`,
        tokens: ["doc", "after", String(seq)],
        locks: [],
        generation: gen,
    }
}

function original(): StreamEvent {
    return {
        type: "original",
        seq: 0,
        score: -0.7,
        description: "original",
        wmd: 0,
        swap_count: 0,
        timestamp: "2026-08-15T10:00:00",
        text: "the movie was bad",
        tokens: ["the", "movie", "was", "bad"],
        locks: [],
        generation: null,
    }
}

function stopped(seq: number, reason = "generations_exhausted"): StreamEvent {
    return {
        type: "stopped",
        seq,
        score: 0.4,
        description: `stopped: ${reason}`,
        reason,
    }
}

describe("append", () => {
    test("every stream event becomes one row, in arrival order", () => {
        const state = new ViewState()
        const events = [original(), ...Array.from({ length: 10 }, (_, i) => generation(i + 1, i + 1, i / 10))]
        for (const event of events) {
            expect(state.append(event)).toBe(true)
        }
        expect(state.rows.map((r) => r.seq)).toEqual(events.map((e) => e.seq))
        expect(state.rows.map((r) => r.description)).toEqual(events.map((e) => e.description))
        expect(state.chart.length).toBe(10)
        expect(state.chart.map((p) => p.generation)).toEqual([1, 2, 3, 4, 5, 6, 7, 8, 9, 10])
        expect(state.lastSeq).toBe(10)
    })

    test("a replayed event is dropped, not re-rowed", () => {
        const state = new ViewState()
        state.append(original())
        state.append(generation(1, 1, 0.1))
        expect(state.append(generation(1, 1, 0.1))).toBe(false)
        expect(state.rows.length).toBe(2)
        expect(state.chart.length).toBe(1)
    })

    test("a stop marker shares the last snapshot's seq but still gets a row", () => {
        const state = new ViewState()
        state.attacking = true
        state.append(original())
        state.append(generation(1, 1, 0.1))
        expect(state.append(stopped(1))).toBe(true)
        expect(state.rows.length).toBe(3)
        expect(state.stopReason).toBe("generations_exhausted")
        expect(state.attacking).toBe(false)
        // the marker replays on resume along with the snapshot it shadows
        expect(state.append(generation(1, 1, 0.1))).toBe(false)
        expect(state.append(stopped(1))).toBe(false)
        expect(state.rows.length).toBe(3)
    })
})

describe("resume", () => {
    test("a fresh view resumes from the start of the log", () => {
        expect(new ViewState().resumeFrom()).toBe(0)
    })

    test("an interrupted stream resumed from lastSeq matches an uninterrupted one", () => {
        const events = [
            original(),
            generation(1, 1, -0.3),
            generation(2, 2, 0.0),
            generation(3, 3, 0.3),
            stopped(3),
        ]
        const uninterrupted = new ViewState()
        for (const event of events) uninterrupted.append(event)

        const resumed = new ViewState()
        for (const event of events.slice(0, 2)) resumed.append(event)
        // the server re-serves everything at or after the requested seq
        for (const event of events.filter((e) => e.seq >= resumed.resumeFrom())) {
            resumed.append(event)
        }
        expect(resumed.rows).toEqual(uninterrupted.rows)
        expect(resumed.chart).toEqual(uninterrupted.chart)
    })
})

describe("sorted", () => {
    function populated(): ViewState {
        const state = new ViewState()
        state.append(original())
        state.append(generation(1, 1, 0.4))
        state.append(generation(2, 2, 0.1))
        state.append(stopped(2))
        return state
    }

    test("no sort key preserves arrival order", () => {
        const state = populated()
        expect(state.sorted(null).map((r) => r.key)).toEqual(state.rows.map((r) => r.key))
    })

    test("sorting is a view: the underlying rows never move", () => {
        const state = populated()
        const before = state.rows.map((r) => r.key)
        state.sorted("score", "desc")
        expect(state.rows.map((r) => r.key)).toEqual(before)
    })

    test("blank cells sink to the bottom in both directions", () => {
        const state = populated() // the stop marker has no wmd
        for (const dir of ["asc", "desc"] as const) {
            const keys = state.sorted("wmd", dir)
            expect(keys[keys.length - 1].type).toBe("stopped")
        }
    })

    test("ties keep their arrival order", () => {
        const state = new ViewState()
        state.append(original())
        state.append({ ...generation(1, 1, 0.1), wmd: 0.2 })
        state.append({ ...generation(2, 2, 0.2), wmd: 0.2 })
        const sorted = state.sorted("wmd", "desc")
        expect(sorted.map((r) => r.seq)).toEqual([1, 2, 0])
    })
})

describe("tokenLayout", () => {
    const roundTrip = (text: string, tokens: string[]) => {
        const { slots, trailing } = tokenLayout(text, tokens)
        expect(slots.map((s) => s.gap + s.surface).join("") + trailing).toBe(text)
        return slots
    }

    test("single spaces", () => {
        const slots = roundTrip("the movie was bad", ["the", "movie", "was", "bad"])
        expect(slots.map((s) => s.gap)).toEqual(["", " ", " ", " "])
    })

    test("punctuation sits flush against its word", () => {
        const slots = roundTrip("Well, the movie was bad!?", [
            "Well", ",", "the", "movie", "was", "bad", "!", "?",
        ])
        expect(slots[1]).toEqual({ gap: "", surface: "," })
        expect(slots[6]).toEqual({ gap: "", surface: "!" })
    })

    test("tabs, doubled spaces, and trailing newlines survive", () => {
        const slots = roundTrip("  good\tmovie \r\n", ["good", "movie"])
        expect(slots[0].gap).toBe("  ")
        expect(slots[1].gap).toBe("\t")
    })

    test("repeated surfaces advance past earlier matches", () => {
        const slots = roundTrip("bad bad bad", ["bad", "bad", "bad"])
        expect(slots.map((s) => s.gap)).toEqual(["", " ", " "])
    })

    test("a token missing from the text is an error, not a silent skip", () => {
        expect(() => tokenLayout("the movie", ["zzz"])).toThrow(/not found/)
    })
})
