// Viridis and plasma color ramps, interpolated from the standard anchor
// colors so the bundle needs no plotting library.

export type Ramp = (t: number) => string

const VIRIDIS: [number, number, number][] = [
    [68, 1, 84],
    [71, 44, 122],
    [59, 81, 139],
    [44, 113, 142],
    [33, 144, 141],
    [39, 173, 129],
    [92, 200, 99],
    [170, 220, 50],
    [253, 231, 37],
]

const PLASMA: [number, number, number][] = [
    [13, 8, 135],
    [75, 3, 161],
    [125, 3, 168],
    [168, 34, 150],
    [203, 70, 121],
    [229, 107, 93],
    [248, 148, 65],
    [253, 195, 40],
    [240, 249, 33],
]

function interpolate(stops: [number, number, number][], t: number): string {
    const clamped = Math.min(1, Math.max(0, t))
    const scaled = clamped * (stops.length - 1)
    const lo = Math.floor(scaled)
    const hi = Math.min(stops.length - 1, lo + 1)
    const frac = scaled - lo
    const channel = (i: number) => Math.round(stops[lo][i] + (stops[hi][i] - stops[lo][i]) * frac)
    return `rgb(${channel(0)}, ${channel(1)}, ${channel(2)})`
}

export const viridis: Ramp = (t) => interpolate(VIRIDIS, t)
export const plasma: Ramp = (t) => interpolate(PLASMA, t)

/** Relative luminance of an rgb(...) string, for brightness assertions. */
export function luminance(color: string): number {
    const match = color.match(/rgba?\((\d+),\s*(\d+),\s*(\d+)/)
    if (!match) return 0
    const [r, g, b] = [Number(match[1]), Number(match[2]), Number(match[3])]
    return (0.2126 * r + 0.7152 * g + 0.0722 * b) / 255
}
