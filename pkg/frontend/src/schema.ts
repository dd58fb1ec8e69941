// Response shapes for the API the console consumes.  Parsed with zod so
// a drifting server fails loudly at the boundary instead of as NaN in a
// badge somewhere.

import { z } from "zod";

export const errorEnvelope = z.object({
  error: z.object({ code: z.string(), message: z.string() }),
});

export const ownerWire = z.object({
  id: z.string(),
  name: z.string(),
  email: z.string(),
  wallet: z.string(),
  createdAt: z.string(),
  updatedAt: z.string(),
});

export const loginResponse = z.object({
  token: z.string(),
  expiresAt: z.number(),
  role: z.string(),
  owner: ownerWire.nullable(),
});

export const vehicleWire = z.object({
  id: z.string(),
  vin: z.string(),
  model: z.string(),
  manufacturer: z.string(),
  ownerId: z.string(),
  batteryHealth: z.number(),
  mileage: z.number(),
  chargingCycles: z.number(),
  drivingPattern: z.string(),
  warrantyExpiry: z.string(),
  anchorTxHash: z.string().nullable(),
}).passthrough();

export const passportStatus = z.object({
  vehicleId: z.string(),
  status: z.enum(["UpToDate", "OutOfDate", "NotAnchored"]),
  digest: z.string(),
  storedDigest: z.string().nullable(),
  anchorTxHash: z.string().nullable(),
  tokenId: z.string().nullable(),
});

export const accessRequestWire = z.object({
  id: z.string(),
  vehicleId: z.string(),
  requester: z.string(),
  // comma-separated on the wire
  fields: z.string(),
  status: z.string(),
  createdAt: z.string(),
  expiresAt: z.string(),
}).passthrough();

export const approveResponse = z.object({ token: z.string() });

export const pendingServiceLogWire = z.object({
  id: z.string(),
  vehicleId: z.string(),
  description: z.string(),
  centerEmail: z.string(),
  centerSignature: z.string(),
  logHash: z.string(),
  servicedAt: z.string(),
  submittedAt: z.string(),
});

export const serviceLogWire = z.object({
  id: z.string(),
  vehicleId: z.string(),
  description: z.string(),
  servicedAt: z.string(),
  centerEmail: z.string(),
  centerSignature: z.string(),
  ownerSignature: z.string().nullable(),
  logHash: z.string(),
  anchorTxHash: z.string().nullable(),
  status: z.string(),
});

export const transferStepResponse = z.object({
  vehicleId: z.string(),
  status: z.string(),
  txHash: z.string().nullable().optional(),
});

export const finalizeResponse = z.object({
  txHash: z.string(),
  height: z.number(),
});

export const proofResponse = z.object({
  kind: z.string(),
  commitment: z.string(),
  proof: z.string(),
  publicSignals: z.object({ threshold: z.number(), result: z.number() }),
});

export const vkeyDoc = z.object({
  kind: z.string(),
  comparator: z.string(),
  params: z.object({
    bits: z.number(),
    p: z.string(),
    q: z.string(),
    g: z.string(),
    h: z.string(),
  }),
  paramsId: z.string(),
  proofSize: z.number(),
});

export type OwnerWire = z.infer<typeof ownerWire>;
export type LoginResponse = z.infer<typeof loginResponse>;
export type VehicleWire = z.infer<typeof vehicleWire>;
export type PassportStatus = z.infer<typeof passportStatus>;
export type AccessRequestWire = z.infer<typeof accessRequestWire>;
export type PendingServiceLogWire = z.infer<typeof pendingServiceLogWire>;
export type ServiceLogWire = z.infer<typeof serviceLogWire>;
export type ProofResponse = z.infer<typeof proofResponse>;
export type VkeyDoc = z.infer<typeof vkeyDoc>;
