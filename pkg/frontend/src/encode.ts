// Visual channel assignment for the document panes.
//
// influence -> text opacity, selection probability -> background color,
// language-model fit -> text color. The channels touch disjoint CSS
// properties, so any subset composes without conflict.

import { viridis, type Ramp } from "./ramps.js"
import type { Encodings } from "./types.js"

export type Channel = "influence" | "selection" | "semantic"

export interface Theme {
    opacityFloor: number
    selectionRamp: Ramp
    lmLowColor: [number, number, number]
    lmHighColor: [number, number, number]
    swapColor: string
    defaultColor: string
}

export const defaultTheme: Theme = {
    opacityFloor: 0.3,
    selectionRamp: viridis,
    // low fit is bright blue, high fit settles to near-black body text
    lmLowColor: [41, 98, 255],
    lmHighColor: [26, 26, 26],
    swapColor: "rgb(41, 98, 255)",
    defaultColor: "rgb(26, 26, 26)",
}

export interface TokenVisual {
    opacity: number
    background: string | null
    color: string
}

function mix(low: [number, number, number], high: [number, number, number], t: number): string {
    const channel = (i: number) => Math.round(low[i] + (high[i] - low[i]) * t)
    return `rgb(${channel(0)}, ${channel(1)}, ${channel(2)})`
}

export function encodeDocument(
    encodings: Pick<Encodings, "tokens" | "influence" | "selection_prob" | "lm_score">,
    active: ReadonlySet<Channel>,
    theme: Theme = defaultTheme,
): TokenVisual[] {
    const n = encodings.tokens.length
    const maxInfluence = Math.max(0, ...encodings.influence.map(Math.abs))
    const maxSelection = Math.max(0, ...encodings.selection_prob)

    const visuals: TokenVisual[] = []
    for (let i = 0; i < n; i++) {
        let opacity = 1.0
        if (active.has("influence")) {
            const scaled = maxInfluence > 0 ? Math.abs(encodings.influence[i]) / maxInfluence : 0
            opacity = theme.opacityFloor + (1 - theme.opacityFloor) * scaled
        }
        let background: string | null = null
        if (active.has("selection")) {
            const scaled = maxSelection > 0 ? encodings.selection_prob[i] / maxSelection : 0
            background = theme.selectionRamp(scaled)
        }
        let color = theme.defaultColor
        if (active.has("semantic")) {
            color = mix(theme.lmLowColor, theme.lmHighColor, encodings.lm_score[i])
        }
        visuals.push({ opacity, background, color })
    }
    return visuals
}

/** The original pane carries no encodings; words the adversary swapped
 *  are colored blue so the reader can diff the panes at a glance. */
export function originalPaneVisuals(
    originalTokens: string[],
    currentTokens: string[],
    theme: Theme = defaultTheme,
): TokenVisual[] {
    return originalTokens.map((surface, i) => ({
        opacity: 1.0,
        background: null,
        color: surface !== currentTokens[i] ? theme.swapColor : theme.defaultColor,
    }))
}
