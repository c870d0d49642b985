/** Virtual tangible presets: eight cubes and eight cylinders. */

export interface TangiblePreset {
  id: string;
  shape: "cube" | "cylinder";
  w: number;
  h: number;
  height_mm: number;
}

function cube(i: number, side: number, height: number): TangiblePreset {
  return { id: `cube-${i}`, shape: "cube", w: side, h: side, height_mm: height };
}

function cylinder(i: number, d: number, height: number): TangiblePreset {
  return { id: `cyl-${i}`, shape: "cylinder", w: d, h: d, height_mm: height };
}

export const TANGIBLES: TangiblePreset[] = [
  cube(1, 46, 46), cube(2, 50, 50), cube(3, 54, 54), cube(4, 58, 58),
  cube(5, 62, 62), cube(6, 66, 66), cube(7, 70, 70), cube(8, 74, 74),
  cylinder(1, 40, 40), cylinder(2, 46, 46), cylinder(3, 52, 52),
  cylinder(4, 58, 58), cylinder(5, 64, 64), cylinder(6, 70, 70),
  cylinder(7, 76, 76), cylinder(8, 82, 82),
];

export const DEFAULT_TANGIBLE = TANGIBLES[1]!;
