// Color language of the studio: the control net is green, diagonal curves
// red, freely prescribable points are drawn large, the selected one stands
// apart. Ghosts (pre-repair curves) are muted.

export const NET = 0x2f9e44;
export const DIAGONAL = 0xe03131;
export const SURFACE = 0x74c0fc;
export const HANDLE = 0x2f9e44;
export const HANDLE_SELECTED = 0xf08c00;
export const GHOST = 0x868e96;

export const NET_POINT_RADIUS = 0.012;
export const HANDLE_RADIUS = 0.035; // free points are deliberately oversized

export const BANNER = {
  green: "#2b8a3e",
  red: "#c92a2a",
  grey: "#495057",
} as const;
